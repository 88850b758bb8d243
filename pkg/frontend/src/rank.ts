/**
 * Rank handling. Ranks are implied by card order within a panel: the card
 * at index 0 holds rank 1, and so on. Reordering is therefore always a
 * permutation; this module keeps the stored rank fields consistent with
 * the visual order.
 */

import type { CardState } from "./types.js";

/** Rewrite rank fields to match array order (1-based). */
export function renumber(cards: CardState[]): void {
  cards.forEach((card, i) => {
    card.rank = i + 1;
  });
}

/** Move the card at `from` to position `to`, shifting the rest. */
export function moveCard(cards: CardState[], from: number, to: number): void {
  if (from < 0 || from >= cards.length) {
    throw new RangeError(`from index ${from} out of bounds`);
  }
  if (to < 0 || to >= cards.length) {
    throw new RangeError(`to index ${to} out of bounds`);
  }
  if (from === to) return;
  const [card] = cards.splice(from, 1);
  cards.splice(to, 0, card!);
  renumber(cards);
}

/**
 * Restore a sane permutation from possibly stale rank values (e.g. a
 * saved draft written by an older build). Cards are ordered by stored
 * rank with ties broken by current position, then renumbered 1..n.
 */
export function repairRanks(cards: CardState[]): void {
  const indexed = cards.map((card, i) => ({ card, i }));
  indexed.sort((a, b) => a.card.rank - b.card.rank || a.i - b.i);
  cards.length = 0;
  for (const entry of indexed) cards.push(entry.card);
  renumber(cards);
}

/** True when ranks form exactly the permutation 1..n in array order. */
export function ranksValid(cards: CardState[]): boolean {
  return cards.every((card, i) => card.rank === i + 1);
}
