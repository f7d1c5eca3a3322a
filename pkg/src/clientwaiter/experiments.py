"""Seeded experiment runners producing CSV rows (and SVG charts).

Every random choice of a task comes from ``task_rng(seed, grid_index,
repetition)``, so each row can be regenerated on its own and results never
depend on execution order.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field, fields
from math import ceil, exp, sqrt
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .decide import CopyGameDecider, k5_minus_edge
from .density import m2
from .game import CW, Side, play
from .goals import ComponentAtLeast, Transversal
from .graph import Graph, make_complete, make_gnp, make_mary_tree, named_graph
from .paths import longest_path
from .strategies.criteria import StrategyParams, build_family, evaluate_criteria
from .strategies.registry import StrategyContext, make_client, make_waiter
from .strategies.star import star_bound
from .structure import find_copies

Z95 = 1.959963984540054


class ConfigError(ValueError):
    pass


# -- statistics and seeding -------------------------------------------------------


def wilson(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def wilson_half_width(successes: int, trials: int) -> float:
    lo, hi = wilson(successes, trials)
    return (hi - lo) / 2


def task_seed(seed: int, grid_index: int, rep: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=seed, spawn_key=(grid_index, rep))


def task_rng(seed: int, grid_index: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(task_seed(seed, grid_index, rep))


def task_int(seed: int, grid_index: int, rep: int) -> int:
    return int(task_seed(seed, grid_index, rep).generate_state(1)[0])


# -- configuration ----------------------------------------------------------------


def parse_config_text(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out


_SCALED = re.compile(r"^(\d*\.?\d*)\*?n(?:\^\(?(\d+(?:\.\d+)?)(?:/(\d+))?\)?)?$")


def parse_bias(token: str, n: int) -> int:
    """A bias given as an integer or as ``c*n^a/b`` (rounded up)."""
    token = token.strip().replace(" ", "")
    if re.fullmatch(r"\d+", token):
        return int(token)
    m = _SCALED.match(token)
    if not m:
        raise ConfigError(f"cannot read bias {token!r}")
    coef = float(m.group(1)) if m.group(1) else 1.0
    expo = float(m.group(2)) / float(m.group(3) or 1) if m.group(2) else 1.0
    return ceil(coef * n**expo - 1e-9)


def _list(value: str) -> list[str]:
    return [t.strip() for t in value.split(",") if t.strip()]


@dataclass
class ExperimentConfig:
    kind: str = "bias-curve"
    n: list[int] = field(default_factory=lambda: [20])
    q: list[str] = field(default_factory=lambda: ["1"])
    p: list[float] = field(default_factory=list)
    c: list[float] = field(default_factory=list)
    reps: int = 10
    seed: int = 0
    waiter: str = "star"
    clients: list[str] = field(default_factory=lambda: ["random"])
    pattern: str = "K3"
    k: int = 2
    m: int | None = None
    eps: float = 0.5
    solver_edges: int = 16
    playout: bool = True
    out_dir: str = "results"
    format: str = "csv"

    _LISTS = {"n": int, "q": str, "p": float, "c": float, "clients": str}
    _SCALARS = {"reps": int, "seed": int, "k": int, "m": int, "eps": float, "solver_edges": int}

    @classmethod
    def from_mapping(cls, raw: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        cfg = cls()
        for key, value in raw.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if key in cls._LISTS:
                items = _list(value) if isinstance(value, str) else list(value)
                value = [cls._LISTS[key](x) for x in items]
            elif key in cls._SCALARS:
                value = cls._SCALARS[key](value)
            elif key == "playout":
                value = str(value).lower() in ("1", "true", "yes", "on")
            setattr(cfg, key, value)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        raw: dict[str, Any] = parse_config_text(Path(path).read_text())
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(raw)

    def validate(self) -> None:
        if not self.n or any(v < 1 for v in self.n):
            raise ConfigError("n grid must be nonempty and positive")
        if not self.q:
            raise ConfigError("q grid must be nonempty")
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        if any(not 0 <= x <= 1 for x in self.p):
            raise ConfigError("p values must lie in [0, 1]")
        if self.format not in ("csv", "svg", "both"):
            raise ConfigError("format must be csv, svg or both")


# -- rows -----------------------------------------------------------------------

ROW_FIELDS = (
    "experiment",
    "n",
    "q",
    "p",
    "c",
    "waiter",
    "client",
    "statistic",
    "value",
    "successes",
    "trials",
    "ci_low",
    "ci_high",
    "half_width",
    "bound",
    "flagged",
    "seed",
    "notes",
)


def make_row(**kw) -> dict[str, Any]:
    row = {f: "" for f in ROW_FIELDS}
    unknown = set(kw) - set(ROW_FIELDS)
    if unknown:
        raise KeyError(f"unknown row fields {sorted(unknown)}")
    row.update(kw)
    if kw.get("trials"):
        lo, hi = wilson(kw["successes"], kw["trials"])
        row.update(ci_low=round(lo, 6), ci_high=round(hi, 6), half_width=round((hi - lo) / 2, 6))
    return row


def write_csv(rows: Iterable[dict], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=ROW_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row)
    return path


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


# -- bias curves ------------------------------------------------------------------

STATISTIC_OF_WAITER = {"star": "max_degree", "S_C": "largest_component", "S_P": "longest_path"}


def measure(statistic: str, client: Graph) -> int:
    if statistic == "max_degree":
        return client.max_degree() if client.e else 0
    if statistic == "largest_component":
        return max((len(c) for c in client.components() if len(c) > 1), default=1)
    if statistic == "longest_path":
        return longest_path(client).length
    raise ConfigError(f"unknown statistic {statistic!r}")


def _smallest_k(n: int, q: int, coef: float) -> int | None:
    """Smallest k with q >= coef * n^(2^k / (2^k - 1)), if any (k <= 30)."""
    for k in range(1, 31):
        if q >= coef * n ** (2**k / (2**k - 1)) - 1e-9:
            return k
    return None


def upper_bound(statistic: str, n: int, q: int) -> float | None:
    """The proven upper bound on the statistic for Waiter's strategy, if one applies."""
    if statistic == "max_degree":
        return star_bound(n, q)
    if statistic == "largest_component":
        k = _smallest_k(n, q, 6)
        return 3**k - 1 if k is not None else None
    if statistic == "longest_path":
        k = _smallest_k(n, q, 3)
        return 2 * k - 1 if k is not None else None
    return None


def lower_bound(statistic: str, n: int, q: int) -> float | None:
    """Asymptotic lower bounds (reported only): large components and long paths
    for Client when ``q <= (1-eps) n / 2``."""
    eps = 1 - 2 * q / n
    if not 0 < eps < 1:
        return None
    if statistic == "largest_component":
        return exp(-5 / (2 * eps) + 1.5) * n
    if statistic == "longest_path":
        return exp(-12 / eps) * n
    return None


def run_bias_curve(cfg: ExperimentConfig) -> list[dict]:
    statistic = STATISTIC_OF_WAITER.get(cfg.waiter.split(":")[0])
    if statistic is None:
        raise ConfigError(f"bias curves need waiter star, S_C or S_P (got {cfg.waiter!r})")
    rows = []
    grid = [(n, parse_bias(tok, n)) for n in cfg.n for tok in cfg.q]
    for gi, (n, q) in enumerate(grid):
        board = make_complete(n)
        ub = upper_bound(statistic, n, q)
        for client_key in cfg.clients:
            values = []
            for rep in range(cfg.reps):
                seed = task_int(cfg.seed, gi, rep)
                ctx = StrategyContext(board, q, seed=seed)
                waiter = make_waiter(cfg.waiter, ctx)
                client = make_client(client_key, ctx)
                rec = play(board, ComponentAtLeast(n + 1), q, CW, waiter, client, seed=seed, early_stop=False)
                values.append(measure(statistic, rec.final.client_graph()))
            within = sum(v <= ub for v in values) if ub is not None else 0
            lb = lower_bound(statistic, n, q)
            rows.append(
                make_row(
                    experiment="bias-curve",
                    n=n,
                    q=q,
                    waiter=cfg.waiter,
                    client=client_key,
                    statistic=statistic,
                    value=max(values),
                    successes=within if ub is not None else "",
                    trials=cfg.reps if ub is not None else "",
                    bound=ub if ub is not None else "",
                    flagged=int(ub is not None and within < cfg.reps),
                    seed=cfg.seed,
                    notes=f"max over runs;mean={np.mean(values):.4g}" + (f";lower={lb:.4g}" if lb is not None else ""),
                )
            )
    return rows


# -- threshold scans --------------------------------------------------------------


def threshold_probabilities(cfg: ExperimentConfig, n: int, pattern: Graph) -> list[tuple[float, float]]:
    """(c, p) pairs: explicit ``p`` values and ``c * n^(-1/m2(H))``."""
    scale = n ** (-1 / float(m2(pattern)))
    pairs = [(p / scale, p) for p in cfg.p]
    pairs += [(c, min(1.0, c * scale)) for c in cfg.c]
    if not pairs:
        raise ConfigError("threshold scan needs p or c values")
    return pairs


def run_threshold_scan(cfg: ExperimentConfig) -> list[dict]:
    pattern = named_graph(cfg.pattern)
    rows = []
    gi = 0
    for n in cfg.n:
        for qtok in cfg.q:
            q = parse_bias(qtok, n)
            gadgets = (k5_minus_edge(),) if q == 1 and pattern.e == 3 else ()
            decider = CopyGameDecider(pattern, q, cfg.solver_edges, playout=cfg.playout, gadgets=gadgets)
            for c, p in threshold_probabilities(cfg, n, pattern):
                wins = decided = 0
                methods: dict[str, int] = {}
                uncertified = 0
                for rep in range(cfg.reps):
                    g = make_gnp(n, p, task_rng(cfg.seed, gi, rep))
                    dec = decider.decide(g)
                    for b in dec.blocks:
                        methods[b.method] = methods.get(b.method, 0) + 1
                    if dec.winner is None:
                        continue
                    decided += 1
                    wins += dec.winner is Side.CLIENT
                    uncertified += not dec.certified
                rows.append(
                    make_row(
                        experiment="threshold",
                        n=n,
                        q=q,
                        p=round(p, 8),
                        c=round(c, 6),
                        waiter="core+blocks",
                        client="threat" if cfg.playout else "",
                        statistic="client_win_rate",
                        value=round(wins / decided, 6) if decided else "",
                        successes=wins,
                        trials=decided,
                        flagged=int(decided < cfg.reps or uncertified > 0),
                        seed=cfg.seed,
                        notes=";".join(
                            [f"undecided={cfg.reps - decided}", f"uncertified={uncertified}"]
                            + [f"{k}={v}" for k, v in sorted(methods.items())]
                        ),
                    )
                )
                gi += 1
    return rows


# -- hitting time -----------------------------------------------------------------


def _closes_triangle(adj: list[set[int]], u: int, v: int) -> bool:
    return bool(adj[u] & adj[v])


def _k5e_through(adj: list[set[int]], u: int, v: int, gadget: Graph) -> bool:
    """Does some copy of K5-e use the edge uv?  Every vertex of such a copy
    is adjacent to u or v, so the neighbourhood suffices."""
    verts = sorted({u, v} | adj[u] | adj[v])
    if len(verts) < 5:
        return False
    index = {x: i for i, x in enumerate(verts)}
    edges = tuple((index[a], index[b]) for a in verts for b in adj[a] if a < b and b in index)
    return bool(find_copies(Graph(len(verts), edges), gadget, limit=1))


@dataclass
class HittingRun:
    tau_client: int | None
    tau_k5e: int | None
    undecided_prefixes: int
    decisions: int


def hitting_run(n: int, rng: np.random.Generator, decider: CopyGameDecider) -> HittingRun:
    """Add the edges of K_n in random order; return both hitting times
    (prefix lengths, 1-based)."""
    all_edges = make_complete(n).edges
    order = rng.permutation(len(all_edges))
    gadget = k5_minus_edge()
    adj: list[set[int]] = [set() for _ in range(n)]
    edges: list[tuple[int, int]] = []
    tau1 = tau2 = None
    undecided = decisions = 0
    for t, idx in enumerate(order, 1):
        u, v = all_edges[idx]
        new_triangle = _closes_triangle(adj, u, v)
        adj[u].add(v)
        adj[v].add(u)
        edges.append((u, v))
        if not new_triangle:
            continue
        if tau2 is None and _k5e_through(adj, u, v, gadget):
            tau2 = t
        if tau1 is None:
            dec = decider.decide(Graph(n, tuple(edges)))
            decisions += 1
            if dec.winner is Side.CLIENT:
                tau1 = t
            elif dec.winner is None:
                undecided += 1
        if tau1 is not None and tau2 is not None:
            break
    return HittingRun(tau1, tau2, undecided, decisions)


def run_hitting_time(cfg: ExperimentConfig) -> tuple[list[dict], list[HittingRun]]:
    rows = []
    runs_all = []
    pattern = make_complete(3)
    for gi, n in enumerate(cfg.n):
        decider = CopyGameDecider(pattern, 1, cfg.solver_edges, gadgets=(k5_minus_edge(),))
        runs = [hitting_run(n, task_rng(cfg.seed, gi, rep), decider) for rep in range(cfg.reps)]
        runs_all.extend(runs)
        agree = sum(r.tau_client == r.tau_k5e for r in runs)
        early = sum(r.tau_client is not None and r.tau_k5e is not None and r.tau_client < r.tau_k5e for r in runs)
        diffs = [r.tau_client - r.tau_k5e for r in runs if r.tau_client is not None and r.tau_k5e is not None]
        common = dict(experiment="hitting-time", n=n, q=1, seed=cfg.seed)
        rows.append(make_row(**common, statistic="agreement", value=round(agree / len(runs), 6), successes=agree, trials=len(runs)))
        rows.append(
            make_row(
                **common,
                statistic="client_not_before_k5e",
                value=round(1 - early / len(runs), 6),
                successes=len(runs) - early,
                trials=len(runs),
                flagged=int(early > 0),
                notes="hard property",
            )
        )
        hist: dict[int, int] = {}
        for d in diffs:
            hist[d] = hist.get(d, 0) + 1
        rows.append(
            make_row(
                **common,
                statistic="tau_difference_histogram",
                value=";".join(f"{d}:{c}" for d, c in sorted(hist.items())),
                notes=f"undecided_prefixes={sum(r.undecided_prefixes for r in runs)};"
                f"mean_tau_k5e={np.mean([r.tau_k5e for r in runs if r.tau_k5e]):.4g}",
            )
        )
    return rows, runs_all


# -- tree game --------------------------------------------------------------------


def contains_tree(tree, client_ids: set[int], k: int) -> bool:
    """Whether Client's edges contain the complete k-ary tree of height
    ``tree.k`` rooted at the root: each used internal vertex needs k claimed
    child edges leading to vertices that again qualify."""
    graph = tree.graph

    def ok(x: int) -> bool:
        if x not in tree.out_edges:
            return True
        good = 0
        for e in tree.out_edges[x]:
            if e in client_ids and ok(graph.other(e, x)):
                good += 1
                if good >= k:
                    return True
        return False

    return ok(0)


def run_tree_game(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for gi, qtok in enumerate(cfg.q):
        q = int(qtok)
        k = cfg.k
        m = cfg.m if cfg.m is not None else (k * (q + 1)) ** 2
        tree = make_mary_tree(m, k)
        params = StrategyParams(q=q, k=k, m=m)
        family = build_family("tree_outedges", tree, params, q)
        crit = evaluate_criteria(family, q)
        board = tree.graph
        for wkey in _list(cfg.waiter):
            wins = embedded = 0
            for rep in range(cfg.reps):
                seed = task_int(cfg.seed, gi, rep)
                ctx = StrategyContext(board, q, family=family, seed=seed)
                waiter = make_waiter(wkey, ctx)
                client = make_client("transversal", ctx)
                rec = play(board, Transversal(family), q, CW, waiter, client, seed=seed, early_stop=False)
                wins += rec.winner is Side.CLIENT
                embedded += contains_tree(tree, set(rec.final.client_edges()), k)
            rows.append(
                make_row(
                    experiment="tree-game",
                    n=board.n,
                    q=q,
                    waiter=wkey,
                    client="transversal:tree_outedges",
                    statistic="client_win_rate",
                    value=round(wins / cfg.reps, 6),
                    successes=wins,
                    trials=cfg.reps,
                    bound=round(crit.phi_T, 6),
                    flagged=int(crit.transversal_holds() and wins < cfg.reps),
                    seed=cfg.seed,
                    notes=f"m={m};k={k};tree_embedded={embedded};criterion_holds={crit.transversal_holds()}",
                )
            )
    return rows


RUNNERS = {
    "bias-curve": run_bias_curve,
    "threshold": run_threshold_scan,
    "tree-game": run_tree_game,
}

