"""Blind rating sessions: pooling, shuffling, persistence, submissions."""

import json

import pytest

from relart.corpus import Document, MeshAnnotation
from relart.providers import ScriptedProvider
from relart.sessions import (
    RankCollision,
    RatingSession,
    SessionNotFound,
    SessionStore,
    UnknownCandidate,
    create_session,
)


def make_doc(pmid, title=None, abstract=None):
    return Document(
        pmid=pmid,
        title=title or f"title {pmid}",
        abstract=abstract or f"abstract text for {pmid}",
        mesh=(MeshAnnotation("Humans"),),
    )


@pytest.fixture()
def world():
    """Six query docs plus forty candidate docs, keyed by str id."""
    docs = [make_doc(100 + i) for i in range(6)]
    pool = [make_doc(200 + i) for i in range(40)]
    by_id = {str(d.pmid): d for d in docs + pool}
    return docs, pool, by_id


def scripted(docs, offsets, name):
    answers = {
        str(d.pmid): [(str(200 + (j + off) % 40), 1.0 - 0.01 * j)
                      for j in range(10)]
        for off, d in zip(offsets, docs)
    }
    return ScriptedProvider(answers, name=name)


class TestCreateSession:
    def test_disjoint_providers_pool_two_k(self, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        b = scripted(docs, [10] * 6, "pmra")
        session = create_session(docs[:2], [a, b], by_id, n_queries=2, k=10,
                                 seed=3)
        for q in session.queries:
            assert len(q.candidates) == 20
            for c in q.candidates:
                assert len(c.sources) == 1

    def test_identical_lists_dedup_to_k_double_mapped(self, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        b = scripted(docs, [0] * 6, "pmra")
        session = create_session(docs[:2], [a, b], by_id, n_queries=2, k=10,
                                 seed=3)
        for q in session.queries:
            assert len(q.candidates) == 10
            for c in q.candidates:
                assert c.sources == ("pv-dbow", "pmra")

    def test_partial_overlap_maps_shared_candidates_to_both(self, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        b = scripted(docs, [5] * 6, "pmra")
        session = create_session(docs[:1], [a, b], by_id, n_queries=1, k=10,
                                 seed=0)
        q = session.queries[0]
        # offsets 0..9 and 5..14 share five ids
        assert len(q.candidates) == 15
        shared = [c for c in q.candidates if len(c.sources) == 2]
        assert len(shared) == 5
        assert {c.doc_id for c in shared} == {str(200 + i) for i in range(5, 10)}

    def test_same_seed_same_order(self, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        b = scripted(docs, [3] * 6, "pmra")
        s1 = create_session(docs, [a, b], by_id, n_queries=4, k=10, seed=11)
        s2 = create_session(docs, [a, b], by_id, n_queries=4, k=10, seed=11)
        assert [
            [c.doc_id for c in q.candidates] for q in s1.queries
        ] == [[c.doc_id for c in q.candidates] for q in s2.queries]

    def test_different_seed_changes_order(self, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        b = scripted(docs, [10] * 6, "pmra")
        s1 = create_session(docs[:1], [a, b], by_id, n_queries=1, k=10, seed=0)
        s2 = create_session(docs[:1], [a, b], by_id, n_queries=1, k=10, seed=1)
        assert {c.doc_id for c in s1.queries[0].candidates} == {
            c.doc_id for c in s2.queries[0].candidates
        }
        assert [c.doc_id for c in s1.queries[0].candidates] != [
            c.doc_id for c in s2.queries[0].candidates
        ]

    def test_candidate_ids_sequential_in_served_order(self, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        session = create_session(docs[:2], [a], by_id, n_queries=2, k=10,
                                 seed=5)
        for qi, q in enumerate(session.queries):
            assert q.query_id == f"q{qi}"
            assert [c.candidate_id for c in q.candidates] == [
                f"q{qi}c{j}" for j in range(len(q.candidates))
            ]

    def test_provider_failure_aborts(self, world):
        docs, _, by_id = world

        class Boom:
            name = "pmra"

            def neighbors(self, doc, k):
                raise RuntimeError("upstream down")

        a = scripted(docs, [0] * 6, "pv-dbow")
        with pytest.raises(RuntimeError):
            create_session(docs[:2], [a, Boom()], by_id, n_queries=2, k=10,
                           seed=0)

    def test_unresolvable_candidates_dropped_and_counted(self, world):
        docs, _, by_id = world
        answers = {str(docs[0].pmid): [("200", 1.0), ("999", 0.9), ("201", 0.8)]}
        a = ScriptedProvider(answers, name="pv-dbow")
        session = create_session(docs[:1], [a], by_id, n_queries=1, k=3, seed=0)
        q = session.queries[0]
        assert {c.doc_id for c in q.candidates} == {"200", "201"}
        assert session.meta["unresolvable_candidates"] == 1
        # ids stay dense after the drop
        assert [c.candidate_id for c in q.candidates] == ["q0c0", "q0c1"]

    def test_query_selection_deterministic_sample(self, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        s1 = create_session(docs, [a], by_id, n_queries=3, k=5, seed=9)
        s2 = create_session(docs, [a], by_id, n_queries=3, k=5, seed=9)
        assert [q.doc_id for q in s1.queries] == [q.doc_id for q in s2.queries]
        assert len(s1.queries) == 3

    def test_validation(self, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        with pytest.raises(ValueError):
            create_session(docs, [a], by_id, n_queries=0, k=10)
        with pytest.raises(ValueError):
            create_session(docs, [a], by_id, n_queries=1, k=0)
        with pytest.raises(ValueError):
            create_session(docs, [], by_id)
        with pytest.raises(ValueError):
            create_session([], [a], by_id)


class TestBlindness:
    FORBIDDEN = {"source", "sources", "doc_id", "pmid"}

    def walk(self, obj):
        if isinstance(obj, dict):
            for key, value in obj.items():
                assert key not in self.FORBIDDEN, f"leaked key {key!r}"
                self.walk(value)
        elif isinstance(obj, list):
            for item in obj:
                self.walk(item)

    def test_blind_payloads_hold_no_identifiers(self, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        b = scripted(docs, [2] * 6, "pmra")
        session = create_session(docs, [a, b], by_id, n_queries=3, k=10,
                                 seed=1)
        self.walk(session.blind_payload())
        for q in session.queries:
            self.walk(q.blind_payload())

    def test_full_dict_keeps_source_map_for_every_candidate(self, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        session = create_session(docs, [a], by_id, n_queries=2, k=10, seed=1)
        d = session.as_dict()
        for q in d["queries"]:
            for c in q["candidates"]:
                assert c["sources"]
                assert c["doc_id"]


class TestSessionStore:
    def make_session(self, world, seed=0):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        b = scripted(docs, [7] * 6, "pmra")
        return create_session(docs[:2], [a, b], by_id, n_queries=2, k=10,
                              seed=seed)

    def test_round_trip(self, tmp_path, world):
        store = SessionStore(tmp_path)
        session = self.make_session(world)
        store.save(session)
        loaded = store.get(session.session_id)
        assert loaded.as_dict() == session.as_dict()

    def test_save_refuses_overwrite_by_default(self, tmp_path, world):
        store = SessionStore(tmp_path)
        session = self.make_session(world)
        store.save(session)
        with pytest.raises(ValueError):
            store.save(session)
        store.save(session, overwrite=True)

    def test_list_ids(self, tmp_path, world):
        store = SessionStore(tmp_path)
        for seed in (2, 1):
            s = self.make_session(world, seed=seed)
            s.session_id = f"sess{seed}"
            store.save(s)
        assert store.list_ids() == ["sess1", "sess2"]

    def test_get_unknown_raises(self, tmp_path):
        store = SessionStore(tmp_path)
        with pytest.raises(SessionNotFound):
            store.get("nope")

    def test_ratings_empty_before_any_submission(self, tmp_path, world):
        store = SessionStore(tmp_path)
        session = self.make_session(world)
        store.save(session)
        assert store.ratings(session.session_id) == []


class TestSubmitRating:
    @pytest.fixture()
    def store_and_session(self, tmp_path, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        b = scripted(docs, [0] * 6, "pmra")
        session = create_session(docs[:2], [a, b], by_id, n_queries=2, k=10,
                                 seed=4)
        store = SessionStore(tmp_path)
        store.save(session)
        return store, session

    def test_valid_submission_stores_sources(self, store_and_session):
        store, session = store_and_session
        cand = session.queries[0].candidates[0]
        record = store.submit_rating(
            session.session_id, "ev1", "q0", cand.candidate_id, 2, 1
        )
        assert record.sources == ("pv-dbow", "pmra")
        stored = store.ratings(session.session_id)
        assert len(stored) == 1
        assert stored[0] == record

    def test_unknown_ids(self, store_and_session):
        store, session = store_and_session
        cand = session.queries[0].candidates[0].candidate_id
        with pytest.raises(SessionNotFound):
            store.submit_rating("ghost", "ev1", "q0", cand, 1, 1)
        with pytest.raises(SessionNotFound):
            store.submit_rating(session.session_id, "ev1", "q9", cand, 1, 1)
        with pytest.raises(UnknownCandidate):
            store.submit_rating(session.session_id, "ev1", "q0", "q0c99", 1, 1)

    def test_relevance_out_of_scale(self, store_and_session):
        store, session = store_and_session
        cand = session.queries[0].candidates[0].candidate_id
        with pytest.raises(ValueError):
            store.submit_rating(session.session_id, "ev1", "q0", cand, 3, 1)

    def test_rank_bounds(self, store_and_session):
        store, session = store_and_session
        cand = session.queries[0].candidates[0].candidate_id
        pool = len(session.queries[0].candidates)
        with pytest.raises(ValueError):
            store.submit_rating(session.session_id, "ev1", "q0", cand, 1, 0)
        with pytest.raises(ValueError):
            store.submit_rating(session.session_id, "ev1", "q0", cand, 1,
                                pool + 1)

    def test_rank_collision_within_evaluator_and_query(self, store_and_session):
        store, session = store_and_session
        c0, c1 = session.queries[0].candidates[:2]
        store.submit_rating(session.session_id, "ev1", "q0",
                            c0.candidate_id, 2, 1)
        with pytest.raises(RankCollision):
            store.submit_rating(session.session_id, "ev1", "q0",
                                c1.candidate_id, 1, 1)
        # same rank is fine for another evaluator or another query
        store.submit_rating(session.session_id, "ev2", "q0",
                            c1.candidate_id, 1, 1)
        q1c0 = session.queries[1].candidates[0]
        store.submit_rating(session.session_id, "ev1", "q1",
                            q1c0.candidate_id, 1, 1)

    def test_resubmission_replaces_and_frees_rank(self, store_and_session):
        store, session = store_and_session
        c0, c1 = session.queries[0].candidates[:2]
        store.submit_rating(session.session_id, "ev1", "q0",
                            c0.candidate_id, 2, 1)
        store.submit_rating(session.session_id, "ev1", "q0",
                            c0.candidate_id, 1, 2)
        effective = store.ratings(session.session_id)
        assert len(effective) == 1
        assert effective[0].relevance == 1 and effective[0].rank == 2
        # rank 1 is free again
        store.submit_rating(session.session_id, "ev1", "q0",
                            c1.candidate_id, 0, 1)

    def test_closed_session_rejects(self, store_and_session):
        store, session = store_and_session
        session.status = "closed"
        store.save(session, overwrite=True)
        cand = session.queries[0].candidates[0].candidate_id
        with pytest.raises(ValueError):
            store.submit_rating(session.session_id, "ev1", "q0", cand, 1, 1)

    def test_log_is_jsonl_on_disk(self, store_and_session, tmp_path):
        store, session = store_and_session
        cand = session.queries[0].candidates[0]
        store.submit_rating(session.session_id, "ev1", "q0",
                            cand.candidate_id, 2, 1)
        raw = (tmp_path / f"{session.session_id}.ratings.jsonl").read_text()
        lines = [json.loads(line) for line in raw.splitlines() if line]
        assert lines[0]["candidate_id"] == cand.candidate_id
        assert lines[0]["sources"] == list(cand.sources)


class TestRoundTripDict:
    def test_from_dict_inverse_of_as_dict(self, world):
        docs, _, by_id = world
        a = scripted(docs, [0] * 6, "pv-dbow")
        session = create_session(docs[:2], [a], by_id, n_queries=2, k=5,
                                 seed=8)
        session.evaluators.append("ev1")
        clone = RatingSession.from_dict(session.as_dict())
        assert clone.as_dict() == session.as_dict()
        assert clone.providers == ("pv-dbow",)
