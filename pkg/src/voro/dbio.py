"""Bit-exact file formats and the on-disk configuration database.

Form file: first line `n`, then n lines of n exact rationals (`p/q` or
bare integers).  Configuration records: a header `n s`, then s lines of
n signed integers; records are separated by one blank line; `#` starts
a comment.  A metadata sidecar rides in front of each record as
`# index=<d> s=<s> r=<r> aut=<order> or-rev=<0|1>`.

Databases are append-only record files plus a JSON manifest carrying
(dim, rank, completeness flag, tool version, content hash) and the task
cursor; interrupted tasks resume from the last durable cursor, so a
restart reproduces the identical output set and ordering.
"""

import hashlib
import json
import os
from dataclasses import dataclass, field

from .forms import QuadraticForm, VectorConfiguration, normalize_pair
from .ratlin import QQ

TOOL_VERSION = "voro 0.1.0"


def format_rational(q):
    q = QQ(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def parse_rational(tok):
    return QQ(tok)


def serialize_form(form: QuadraticForm) -> str:
    lines = [str(form.dim)]
    for row in form.entries:
        lines.append(" ".join(format_rational(x) for x in row))
    return "\n".join(lines) + "\n"


def parse_form(text: str) -> QuadraticForm:
    rows = []
    n = None
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            n = int(line)
            continue
        rows.append([parse_rational(t) for t in line.split()])
    if n is None or len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError("malformed form file")
    return QuadraticForm.from_rows(rows)


def serialize_record(config: VectorConfiguration, meta=None) -> str:
    lines = []
    if meta:
        parts = " ".join(f"{k}={v}" for k, v in meta.items())
        lines.append(f"# {parts}")
    lines.append(f"{config.dim} {config.s}")
    for v in config.vectors:
        lines.append(" ".join(str(x) for x in v))
    return "\n".join(lines) + "\n"


def parse_records(text: str, warn=None):
    """Parse a record file into canonical configurations.

    Non-canonical vectors (unnormalized pair representatives, unsorted
    order) are normalized with a warning callback; malformed lines,
    dimension mismatches and duplicate pairs raise ValueError.
    """
    configs = []
    metas = []
    pending_meta = {}
    block = []

    def flush():
        nonlocal pending_meta, block
        if not block:
            pending_meta = {}
            return
        header = block[0].split()
        if len(header) != 2:
            raise ValueError(f"malformed record header: {block[0]!r}")
        n, s = int(header[0]), int(header[1])
        if len(block) - 1 != s:
            raise ValueError("record vector count differs from header")
        vecs = []
        for line in block[1:]:
            toks = line.split()
            if len(toks) != n:
                raise ValueError("vector length differs from dimension")
            vecs.append(tuple(int(t) for t in toks))
        norm = [normalize_pair(v) for v in vecs]
        if len(set(norm)) != len(norm):
            raise ValueError("duplicate pair in record")
        canonical = tuple(sorted(norm))
        if canonical != tuple(vecs) and warn is not None:
            warn("record normalized to canonical form")
        configs.append(VectorConfiguration(n, canonical))
        metas.append(dict(pending_meta))
        pending_meta = {}
        block = []

    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                for part in body.split():
                    if "=" in part:
                        k, v = part.split("=", 1)
                        pending_meta[k] = v
            continue
        if not line:
            flush()
            continue
        block.append(line)
    flush()
    return configs, metas


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class RunConfig:
    """Runtime knobs; environment supplies threads and cache directory."""

    threads: int = 1
    cache_dir: str = ""
    iteration_budget: int = 200
    pool_cap: int = 20000
    long_run: bool = False

    def __post_init__(self):
        if self.threads <= 0 or self.iteration_budget <= 0 or self.pool_cap <= 0:
            raise ValueError("caps must be positive")

    @classmethod
    def from_env(cls, **overrides):
        threads = int(os.environ.get("VORO_THREADS", "1"))
        cache = os.environ.get("VORO_CACHE_DIR", "")
        cfg = cls(threads=threads, cache_dir=cache)
        for k, v in overrides.items():
            setattr(cfg, k, v)
        return cfg


class ConfigurationDatabase:
    """Append-only record store with manifest and resumable cursor."""

    def __init__(self, path):
        self.path = path
        self.manifest_path = path + ".manifest.json"
        self._fh = None

    # -- creation / loading -------------------------------------------------

    def create(self, dim, rank):
        self._write_manifest(
            {
                "dim": dim,
                "rank": rank,
                "complete": False,
                "version": TOOL_VERSION,
                "cursor": None,
                "hash": None,
            }
        )
        open(self.path, "w").close()

    def manifest(self):
        with open(self.manifest_path) as fh:
            return json.load(fh)

    def exists(self):
        return os.path.exists(self.path) and os.path.exists(self.manifest_path)

    def _write_manifest(self, data):
        tmp = self.manifest_path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(data, fh, indent=1, sort_keys=True)
        os.replace(tmp, self.manifest_path)

    # -- appends -------------------------------------------------------------

    def _handle(self):
        if self._fh is None:
            self._fh = open(self.path, "a")
        return self._fh

    def append_record(self, config, meta=None, cursor=None):
        fh = self._handle()
        if cursor is not None:
            fh.write(f"# cursor={cursor}\n")
        fh.write(serialize_record(config, meta))
        fh.write("\n")
        fh.flush()
        os.fsync(fh.fileno())

    def write_progress(self, cursor):
        fh = self._handle()
        fh.write(f"# cursor={cursor}\n")
        fh.flush()
        os.fsync(fh.fileno())

    def last_cursor(self):
        cursor = None
        if not os.path.exists(self.path):
            return None
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if line.startswith("# cursor="):
                    cursor = line[len("# cursor=") :]
        return cursor

    def finalize(self, complete=True):
        if self._fh is not None:
            self._fh.close()
            self._fh = None
        man = self.manifest()
        with open(self.path) as fh:
            man["hash"] = content_hash(fh.read())
        man["complete"] = complete
        man["cursor"] = None
        self._write_manifest(man)

    def verify_hash(self):
        man = self.manifest()
        if man.get("hash") is None:
            return False
        with open(self.path) as fh:
            return content_hash(fh.read()) == man["hash"]

    def load(self):
        with open(self.path) as fh:
            return parse_records(fh.read())


@dataclass
class EnumerationTask:
    """Resumable scan over the code stream for one (dim, prime) pair.

    The cursor is the last candidate word processed (realizable or not);
    restart skips every candidate up to and including it, so the output
    set and ordering are reproduced exactly.
    """

    dim: int
    prime: int
    db: ConfigurationDatabase
    progress_every: int = 50
    realizer: object = None  # injectable for tests
    processed: int = field(default=0)

    def run(self, interrupt_after=None):
        from .enumeration import enumerate_codes_prime
        from .forms import code_to_configuration
        from .realize import REALIZABLE, test_realizability

        realizer = self.realizer or (
            lambda cfg: test_realizability(cfg).status == REALIZABLE
        )
        cursor = self.db.last_cursor()
        resume_word = None
        if cursor:
            resume_word = tuple(int(t) for t in cursor.split(","))
        since_progress = 0
        for code in enumerate_codes_prime(self.dim, self.prime):
            if resume_word is not None and code.word <= resume_word:
                continue
            cfg = code_to_configuration(code)
            token = ",".join(str(x) for x in code.word)
            if realizer(cfg):
                meta = {"index": self.prime, "s": cfg.s}
                self.db.append_record(cfg, meta=meta, cursor=token)
                since_progress = 0
            else:
                since_progress += 1
                if since_progress >= self.progress_every:
                    self.db.write_progress(token)
                    since_progress = 0
            self.processed += 1
            if interrupt_after is not None and self.processed >= interrupt_after:
                return False  # simulated kill
        self.db.write_progress("done")
        return True


def parallel_map(func, items, threads):
    """Deterministic order-preserving map, optionally thread-pooled."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
