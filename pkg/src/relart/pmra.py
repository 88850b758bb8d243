"""eLink client for PubMed related-article (pmra) neighbors.

Live mode talks to the NCBI eUtils endpoint under a global token-bucket
rate limit, caching every response body to disk keyed by (pmid, endpoint
version). Fixture mode replays one recorded XML file per PMID and never
touches the network; both modes share the parser, so identical payloads
yield identical results.
"""

from __future__ import annotations

import threading
import time
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Callable, Iterable, Sequence

import requests

from .embedding.similarity import NeighborList

__all__ = [
    "ELINK_URL",
    "ENDPOINT_VERSION",
    "PmraTransportError",
    "PmraParseError",
    "TokenBucket",
    "PmraClient",
    "normalize_scores",
    "normalize_neighbor_lists",
]

ELINK_URL = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/elink.fcgi"
ENDPOINT_VERSION = "elink-v1"
LINKNAME = "pubmed_pubmed"


class PmraTransportError(Exception):
    """HTTP-level failure, carrying retry metadata."""

    def __init__(self, message: str, status: int | None = None, attempts: int = 1):
        super().__init__(message)
        self.status = status
        self.attempts = attempts


class PmraParseError(Exception):
    """Response body was not a well-formed eLink result."""


class TokenBucket:
    """Simple token bucket; acquire() blocks until a token is available.

    Clock and sleep are injectable so the rate property can be tested at an
    accelerated fake clock.
    """

    def __init__(
        self,
        rate: float,
        capacity: float | None = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate
        self.capacity = capacity if capacity is not None else max(rate, 1.0)
        self._tokens = self.capacity
        self._clock = clock
        self._sleep = sleep
        self._updated = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        # the 1e-9 slack absorbs float rounding in refill arithmetic,
        # which would otherwise spin on clocks too coarse to advance by
        # the residual sliver
        with self._lock:
            while True:
                now = self._clock()
                self._tokens = min(
                    self.capacity,
                    self._tokens + (now - self._updated) * self.rate,
                )
                self._updated = now
                if self._tokens >= 1.0 - 1e-9:
                    self._tokens = max(self._tokens - 1.0, 0.0)
                    return
                self._sleep((1.0 - self._tokens) / self.rate)


def _parse_elink(body: bytes | str, pmid: int) -> list[tuple[str, float]]:
    """Extract (id, score) pairs from the pubmed_pubmed link set, served
    order preserved, the query itself dropped."""
    try:
        root = ET.fromstring(body)
    except ET.ParseError as exc:
        raise PmraParseError(f"malformed eLink response for {pmid}: {exc}")
    pairs: list[tuple[str, float]] = []
    for linkset_db in root.iter("LinkSetDb"):
        name = linkset_db.findtext("LinkName")
        if name != LINKNAME:
            continue
        for link in linkset_db.iter("Link"):
            link_id = link.findtext("Id")
            score = link.findtext("Score")
            if link_id is None or score is None:
                raise PmraParseError(
                    f"Link element missing Id or Score for {pmid}"
                )
            if link_id == str(pmid):
                continue
            pairs.append((link_id, float(score)))
        return pairs
    return pairs  # no pubmed_pubmed set: PMID with no neighbors


class PmraClient:
    """Neighbor fetcher. Pass fixture_dir for offline replay; otherwise
    requests go to the live endpoint (rate limited, cached, retried with
    exponential backoff on 429/5xx). offline=True forbids live fetches
    even without fixtures: anything not already cached is an error."""

    def __init__(
        self,
        *,
        rate: float = 3.0,
        api_key: str | None = None,
        cache_dir: str | Path | None = None,
        fixture_dir: str | Path | None = None,
        offline: bool = False,
        session: requests.Session | None = None,
        max_retries: int = 3,
        backoff_base: float = 1.0,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        # NCBI allows 10 rps with an API key, 3 without
        if api_key and rate == 3.0:
            rate = 10.0
        self.api_key = api_key
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.fixture_dir = Path(fixture_dir) if fixture_dir else None
        self.offline = offline
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._bucket = TokenBucket(rate, clock=clock, sleep=sleep)
        self._sleep = sleep
        self._session = session or requests.Session()
        self._cache_lock = threading.Lock()
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)

    @property
    def name(self) -> str:
        return "pmra"

    def _cache_path(self, pmid: int) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"{ENDPOINT_VERSION}.{pmid}.xml"

    def _fetch_body(self, pmid: int) -> bytes:
        cache = self._cache_path(pmid)
        if cache is not None:
            with self._cache_lock:
                if cache.exists():
                    return cache.read_bytes()
        if self.fixture_dir is not None:
            fixture = self.fixture_dir / f"{pmid}.xml"
            if not fixture.exists():
                raise PmraTransportError(
                    f"no fixture recorded for PMID {pmid}", status=None
                )
            body = fixture.read_bytes()
        elif self.offline:
            raise PmraTransportError(
                f"offline mode: PMID {pmid} not cached", status=None
            )
        else:
            body = self._fetch_live(pmid)
        if cache is not None:
            with self._cache_lock:
                tmp = cache.with_suffix(".tmp")
                tmp.write_bytes(body)
                tmp.replace(cache)
        return body

    def _fetch_live(self, pmid: int) -> bytes:
        params = {
            "dbfrom": "pubmed",
            "id": str(pmid),
            "cmd": "neighbor_score",
            "linkname": LINKNAME,
        }
        if self.api_key:
            params["api_key"] = self.api_key
        last_status = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff_base * 2 ** (attempt - 1))
            self._bucket.acquire()
            try:
                resp = self._session.get(ELINK_URL, params=params, timeout=30)
            except requests.RequestException as exc:
                last_status = None
                if attempt == self.max_retries:
                    raise PmraTransportError(
                        f"eLink request failed for {pmid}: {exc}",
                        attempts=attempt + 1,
                    )
                continue
            if resp.status_code == 200:
                return resp.content
            last_status = resp.status_code
            if resp.status_code == 429 or resp.status_code >= 500:
                continue
            raise PmraTransportError(
                f"eLink returned {resp.status_code} for {pmid}",
                status=resp.status_code,
                attempts=attempt + 1,
            )
        raise PmraTransportError(
            f"eLink retries exhausted for {pmid}",
            status=last_status,
            attempts=self.max_retries + 1,
        )

    def fetch_pmra_neighbors(self, pmid: int, k: int) -> NeighborList:
        if int(pmid) <= 0:
            raise ValueError("pmid must be positive")
        if k < 1:
            raise ValueError("k must be >= 1")
        pairs = _parse_elink(self._fetch_body(int(pmid)), int(pmid))
        return NeighborList(
            query_id=str(pmid),
            neighbors=pairs[:k],
            source="pmra",
            truncated=len(pairs) < k,
        )


def normalize_scores(scores: Sequence[float]) -> list[float]:
    """Global min-max map onto [0, 1]. The population is the whole set of
    scores gathered across a run, never a single result list."""
    values = [float(s) for s in scores]
    if len(values) < 2:
        raise ValueError("need at least 2 scores to normalize")
    lo, hi = min(values), max(values)
    if lo == hi:
        raise ValueError("degenerate range: all scores identical")
    span = hi - lo
    return [(v - lo) / span for v in values]


def normalize_neighbor_lists(lists: Iterable[NeighborList]) -> list[NeighborList]:
    """Rescale every list's scores with one global min-max over the union."""
    lists = list(lists)
    pool = [s for nl in lists for _, s in nl.neighbors]
    normed = normalize_scores(pool)
    it = iter(normed)
    out = []
    for nl in lists:
        neighbors = [(doc_id, next(it)) for doc_id, _ in nl.neighbors]
        out.append(
            NeighborList(nl.query_id, neighbors, nl.source, nl.truncated)
        )
    return out
