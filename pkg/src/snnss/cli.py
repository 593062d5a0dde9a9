"""Command-line harness: every verification the library performs, as a
subcommand emitting a machine-readable artifact plus a terse stdout summary.

Artifacts are deterministic given the config (seeds included); reruns are
byte-identical. JSON reports carry the fully resolved config under "config";
CSV reports carry it as a leading "# config: {...}" comment line. Exit
codes: 0 success, 1 verification failure, 2 usage or config error,
3 resource bound exceeded.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from pathlib import Path

import numpy as np

from .closed_form import (
    bernoulli_initial,
    build_mcf,
    decay_rates,
    e_coeffs,
    epsilon_M,
    mcf_initial,
    select_model,
)
from .config_stats import (
    RESIDUAL_KEYS,
    Configuration,
    all_empty,
    all_occupied,
    enumerate_configurations,
    lemma_check,
    lemma_f1,
    lemma_residual_batch,
    identity_report_batch,
    random_configurations,
    with_occupied,
)
from .errors import (
    DegenerateSpectrumError,
    DomainError,
    NonErgodicError,
    ResourceLimitError,
    SnnssError,
)
from .exact_solver import (
    bernoulli_distribution,
    build_full_generator,
    point_distribution,
    spectral_gap_exact,
    transient_mean_coverage,
)
from .generator import fit_closure
from .gillespie import ensemble_mcf, replica_generator, simulate
from .graph import NAMED_GRAPHS, Graph, build_cycle, build_named, build_torus, load_edge_list
from .rates import (
    RateTable,
    classify,
    make_generalized_threshold,
    make_noisy_voter,
    make_threshold_voter,
)

__all__ = ["main", "entrypoint"]

CONFIG_SCHEMA = "snnss-config-1"
REPORT_SCHEMA = "snnss-report-1"

_DEFAULT_GRID = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0]

# past this size exhaustive enumeration / uniformization is no longer the
# default (still forceable up to the module limits)
_AUTO_EXHAUSTIVE_N = 16
_AUTO_EXACT_N = 14

_DEFAULTS = {
    "verify-identities": {
        "graph": {"name": "cycle", "n": 8},
        "mode": "identities",
        "exhaustive": None,
        "samples": 10000,
        "expect_violation": False,
        "seed": 0,
    },
    "closure": {
        "graph": {"name": "cycle", "n": 8},
        "rates": None,
        "sample": None,
        "tol": 1e-6,
        "match_rtol": 1e-6,
        "seed": 0,
    },
    "mcf-compare": {
        "graph": {"name": "cycle", "n": 8},
        "rates": None,
        "init": {"bernoulli": 0.5},
        "t_grid": _DEFAULT_GRID,
        "exact": None,
        "replicas": 0,
        "tol": 1e-7,
        "mc_sigma": 4.0,
        "tail_tol": 1e-12,
        "seed": 0,
        "threads": None,
        "backend": None,
    },
    "gap": {
        "graph": {"name": "cycle", "n": 8},
        "rates": None,
        "tol": 1e-6,
    },
    "prop2": {
        "graphs": [{"name": "cycle", "n": 8}, {"name": "cycle", "n": 12}],
        "rates": None,
        "densities": [0.2, 0.5, 0.9],
        "t_grid": _DEFAULT_GRID,
        "tol": 1e-8,
        "expect_equal": True,
        "diff_floor": 1e-4,
        "tail_tol": 1e-12,
    },
    "conjecture-probe": {
        "graph": {"name": "cycle", "n": 8},
        "n_tables": 500,
        "n_constructed": 5,
        "tol": 1e-6,
        "seed": 0,
    },
    "simulate": {
        "graph": {"name": "cycle", "n": 8},
        "rates": None,
        "init": {"bernoulli": 0.5},
        "t_max": 10.0,
        "t_grid": None,
        "replicas": 1,
        "seed": 0,
        "threads": None,
        "backend": None,
    },
}

_OUT_EXT = {
    "verify-identities": "json",
    "closure": "json",
    "mcf-compare": "csv",
    "gap": "json",
    "prop2": "json",
    "conjecture-probe": "csv",
    "simulate": "csv",
}


def _py(obj):
    """Plain-Python mirror of obj for json serialization."""
    if isinstance(obj, dict):
        return {str(k): _py(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_py(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _py(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _g17(x) -> str:
    return "%.17g" % float(x)


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return _g17(v)


def _write_json(path: str, obj) -> None:
    Path(path).write_text(json.dumps(_py(obj), indent=2, sort_keys=True) + "\n")


def _write_csv(path: str, resolved: dict, header, rows) -> None:
    lines = ["# config: " + json.dumps(_py(resolved), sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _build_graph(spec) -> tuple[Graph, dict]:
    if not isinstance(spec, dict):
        raise DomainError("graph spec must be a JSON object")
    if "edge_list" in spec:
        if set(spec) != {"edge_list"}:
            raise DomainError(f"edge-list graph spec takes only 'edge_list', got {sorted(spec)}")
        path = str(spec["edge_list"])
        return load_edge_list(Path(path).read_text()), {"edge_list": path}
    name = spec.get("name")
    if name == "cycle":
        if set(spec) != {"name", "n"}:
            raise DomainError(f"cycle spec takes 'name' and 'n', got {sorted(spec)}")
        n = int(spec["n"])
        return build_cycle(n), {"name": "cycle", "n": n}
    if name == "torus":
        if set(spec) != {"name", "sides"}:
            raise DomainError(f"torus spec takes 'name' and 'sides', got {sorted(spec)}")
        sides = [int(v) for v in spec["sides"]]
        return build_torus(sides), {"name": "torus", "sides": sides}
    if name in NAMED_GRAPHS:
        if set(spec) != {"name"}:
            raise DomainError(f"named graph spec takes only 'name', got {sorted(spec)}")
        return build_named(name), {"name": name}
    raise DomainError(
        f"unknown graph {name!r}; use cycle, torus, one of {', '.join(NAMED_GRAPHS)}, or edge_list"
    )


def _build_rates(spec) -> tuple[RateTable, dict]:
    if spec is None:
        raise DomainError("config must provide 'rates'")
    if not isinstance(spec, dict):
        raise DomainError("rate spec must be a JSON object")
    fam = spec.get("family")
    if fam is None:
        r = RateTable.from_dict(spec)
        extra = set(spec) - {"s", "lambda", "mu"}
        if extra:
            raise DomainError(f"unknown rate spec keys {sorted(extra)}")
    elif fam == "noisy_voter":
        if set(spec) != {"family", "s", "d", "h1", "h2"}:
            raise DomainError("noisy_voter takes s, d, h1, h2")
        r = make_noisy_voter(int(spec["s"]), float(spec["d"]), float(spec["h1"]), float(spec["h2"]))
    elif fam == "threshold_voter":
        keys = set(spec) - {"q"}
        if keys != {"family", "s", "h", "a"}:
            raise DomainError("threshold_voter takes s, h, a and optional q")
        s = int(spec["s"])
        r = make_threshold_voter(s, int(spec.get("q", s)), float(spec["h"]), float(spec["a"]))
    elif fam == "generalized_threshold":
        keys = set(spec) - {"q"}
        if keys != {"family", "s", "h", "a", "b"}:
            raise DomainError("generalized_threshold takes s, h, a, b and optional q")
        s = int(spec["s"])
        r = make_generalized_threshold(
            s, int(spec.get("q", s)), float(spec["h"]), float(spec["a"]), float(spec["b"])
        )
    else:
        raise DomainError(
            f"unknown rate family {fam!r}; use noisy_voter, threshold_voter, "
            "generalized_threshold, or an explicit table"
        )
    echo = {"s": r.s, "lambda": list(r.lam), "mu": list(r.mu)}
    if fam is not None:
        echo["family"] = fam
    return r, echo


def _build_init(spec, g: Graph):
    """Initial condition: a Configuration or a Bernoulli density, plus echo."""
    if not isinstance(spec, dict) or len(spec) != 1:
        raise DomainError(
            "init spec must be exactly one of "
            '{"bernoulli": p}, {"string": bits}, {"point": "empty"|"full"}, {"occupied": [sites]}'
        )
    (key, val), = spec.items()
    if key == "bernoulli":
        p = float(val)
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"Bernoulli density must lie in [0, 1], got {p}")
        return p, {"bernoulli": p}
    if key == "string":
        c = Configuration.from_string(str(val))
        if c.n != g.n:
            raise DomainError(f"init string has {c.n} sites, graph has {g.n}")
        return c, {"string": c.to_string()}
    if key == "point":
        if val == "empty":
            return all_empty(g.n), {"point": "empty"}
        if val == "full":
            return all_occupied(g.n), {"point": "full"}
        raise DomainError(f"point init must be 'empty' or 'full', got {val!r}")
    if key == "occupied":
        sites = [int(v) for v in val]
        return with_occupied(g.n, sites), {"occupied": sites}
    raise DomainError(f"unknown init key {key!r}")


def _config_batch(g: Graph, exhaustive, samples: int, seed: int):
    """(bits matrix, mode string) for identity-style sweeps."""
    if exhaustive is None:
        exhaustive = g.n <= _AUTO_EXHAUSTIVE_N
    if exhaustive:
        return enumerate_configurations(g.n), "exhaustive"
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    return random_configurations(g.n, int(samples), replica_generator(seed, 0)), "sampled"


def _bits_string(bits) -> str:
    return "".join("1" if b else "0" for b in bits)


def _cmd_verify_identities(cfg: dict, out: str) -> int:
    g, graph_echo = _build_graph(cfg["graph"])
    mode = cfg["mode"]
    if mode not in ("identities", "lemma"):
        raise DomainError(f"mode must be 'identities' or 'lemma', got {mode!r}")
    bits, sweep = _config_batch(g, cfg["exhaustive"], cfg["samples"], cfg["seed"])
    resolved = {
        "graph": graph_echo,
        "mode": mode,
        "sweep": sweep,
        "samples": None if sweep == "exhaustive" else int(cfg["samples"]),
        "seed": int(cfg["seed"]),
        "expect_violation": bool(cfg["expect_violation"]),
    }
    report = {
        "schema": REPORT_SCHEMA,
        "command": "verify-identities",
        "config": resolved,
        "graph": {"n": g.n, "s": g.s},
        "n_configurations": int(bits.shape[0]),
    }

    if mode == "identities":
        res = identity_report_batch(g, bits)
        keys = [k for k in RESIDUAL_KEYS if k in res]
        report["max_abs_residual"] = {k: int(np.abs(res[k]).max()) for k in keys}
        total = sum(np.abs(res[k]) for k in keys)
        ok = int(total.max()) == 0
        report["pass"] = ok
        report["offending"] = None
        if not ok:
            i = int(total.argmax())
            report["offending"] = {
                "configuration": _bits_string(bits[i]),
                "residuals": {k: int(res[k][i]) for k in keys},
            }
        _write_json(out, report)
        print(
            f"verify-identities: {bits.shape[0]} configurations on n={g.n} s={g.s}, "
            f"max residual {int(total.max())}"
        )
        print("PASS" if ok else "FAIL")
        return 0 if ok else 1

    res = lemma_residual_batch(g, bits)
    x = 0
    y = int(g.neighbors[0, 0])
    pair = lemma_check(g, with_occupied(g.n, [x, y]))
    worst = int(np.abs(res).max())
    n_viol = int(np.count_nonzero(res)) + (pair != 0)
    report["f1"] = lemma_f1(g.s)
    report["max_abs_residual"] = worst
    report["n_violations"] = n_viol
    report["adjacent_pair_residual"] = pair
    expect = bool(cfg["expect_violation"])
    ok = (n_viol > 0) if expect else (n_viol == 0)
    report["pass"] = ok
    report["offending"] = None
    if worst > 0:
        i = int(np.abs(res).argmax())
        report["offending"] = {"configuration": _bits_string(bits[i]), "residual": int(res[i])}
    _write_json(out, report)
    print(
        f"lemma: s={g.s}, F1={report['f1']}, worst |residual| {worst}, "
        f"adjacent-pair residual {pair}, expected violation: {expect}"
    )
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_closure(cfg: dict, out: str) -> int:
    g, graph_echo = _build_graph(cfg["graph"])
    r, rates_echo = _build_rates(cfg["rates"])
    sample_size = cfg["sample"]
    sample = None
    if sample_size is not None:
        sample = random_configurations(g.n, int(sample_size), replica_generator(cfg["seed"], 0))
    fit = fit_closure(g, r, sample=sample, seed=int(cfg["seed"]), tol=float(cfg["tol"]))
    mc = classify(r)
    resolved = {
        "graph": graph_echo,
        "rates": rates_echo,
        "sample": None if sample_size is None else int(sample_size),
        "tol": float(cfg["tol"]),
        "match_rtol": float(cfg["match_rtol"]),
        "seed": int(cfg["seed"]),
    }
    report = {
        "schema": REPORT_SCHEMA,
        "command": "closure",
        "config": resolved,
        "fitted": {"a1": fit.a1, "a0": fit.a0, "b": fit.b},
        "residual_max": fit.residual_max,
        "residual_rms": fit.residual_rms,
        "n_samples": fit.n_samples,
        "holds": fit.holds,
        "threshold": fit.threshold,
        "classification": {
            "labels": sorted(mc.labels),
            "primary": mc.primary,
        },
        "expected": None,
        "max_rel_coeff_diff": None,
    }
    if mc.primary is not None:
        label, params = select_model(mc)
        exp = e_coeffs(label, params, g.n)
        rel = max(
            abs(got - want) / max(1.0, abs(want))
            for got, want in zip((fit.a1, fit.a0, fit.b), exp)
        )
        report["classification"]["params"] = params
        report["expected"] = {"a1": exp[0], "a0": exp[1], "b": exp[2]}
        report["max_rel_coeff_diff"] = rel
        ok = fit.holds and rel <= float(cfg["match_rtol"])
    else:
        ok = not fit.holds
    report["pass"] = ok
    _write_json(out, report)
    fam = mc.primary or "none"
    print(
        f"closure: family {fam}, fitted (A1, A0, B) = "
        f"({_g17(fit.a1)}, {_g17(fit.a0)}, {_g17(fit.b)}), "
        f"residual_max {_g17(fit.residual_max)}, holds: {fit.holds}"
    )
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _mc_allowed_failures(n_points: int, sigma: float) -> int:
    # expected false positives for a two-sided sigma-level test per point
    return int(n_points * math.erfc(sigma / math.sqrt(2.0)))


def _cmd_mcf_compare(cfg: dict, out: str) -> int:
    g, graph_echo = _build_graph(cfg["graph"])
    r, rates_echo = _build_rates(cfg["rates"])
    init, init_echo = _build_init(cfg["init"], g)
    label, params = select_model(classify(r))
    t_grid = np.asarray(cfg["t_grid"], dtype=np.float64)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise DomainError("t_grid must be a non-empty list of times")

    if isinstance(init, Configuration):
        initial = mcf_initial(g, r, init)
    else:
        initial = bernoulli_initial(g.n, r, init)
    curve = build_mcf(label, params, g.n, initial)
    closed = curve.evaluate(t_grid)

    do_exact = cfg["exact"]
    if do_exact is None:
        do_exact = g.n <= _AUTO_EXACT_N
    exact_vals = np.full(t_grid.shape, np.nan)
    if do_exact:
        fg = build_full_generator(g, r)
        if isinstance(init, Configuration):
            dist = point_distribution(g.n, init)
        else:
            dist = bernoulli_distribution(g.n, init)
        exact_vals = transient_mean_coverage(fg, dist, t_grid, tail_tol=float(cfg["tail_tol"])).values

    replicas = int(cfg["replicas"])
    mean = np.full(t_grid.shape, np.nan)
    stderr = np.full(t_grid.shape, np.nan)
    if replicas > 0:
        est = ensemble_mcf(
            g, r, init, t_grid, replicas, int(cfg["seed"]),
            threads=cfg["threads"], backend=cfg["backend"],
        )
        mean, stderr = est.mean, est.stderr

    resolved = {
        "graph": graph_echo,
        "rates": rates_echo,
        "init": init_echo,
        "t_grid": [float(t) for t in t_grid],
        "exact": bool(do_exact),
        "replicas": replicas,
        "tol": float(cfg["tol"]),
        "mc_sigma": float(cfg["mc_sigma"]),
        "tail_tol": float(cfg["tail_tol"]),
        "seed": int(cfg["seed"]),
    }
    rows = [
        (t_grid[i], closed[i], exact_vals[i], mean[i], stderr[i])
        for i in range(t_grid.size)
    ]
    _write_csv(out, resolved, ("t", "closed_form", "exact", "mc_mean", "mc_stderr"), rows)

    ok = True
    print(f"mcf-compare: family {label} on n={g.n} s={g.s}, {t_grid.size} grid points")
    if do_exact:
        err = float(np.abs(closed - exact_vals).max())
        exact_ok = err <= float(cfg["tol"])
        ok &= exact_ok
        print(f"  closed vs exact: max |diff| = {_g17(err)} (bound {_g17(cfg['tol'])})")
    if replicas > 0:
        sigma = float(cfg["mc_sigma"])
        fails = int(np.count_nonzero(np.abs(closed - mean) > sigma * stderr))
        allowed = _mc_allowed_failures(t_grid.size, sigma)
        mc_ok = fails <= allowed
        ok &= mc_ok
        print(f"  closed vs mc ({replicas} replicas): {fails} points beyond "
              f"{sigma} sigma (allowed {allowed})")
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_gap(cfg: dict, out: str) -> int:
    g, graph_echo = _build_graph(cfg["graph"])
    r, rates_echo = _build_rates(cfg["rates"])
    tol = float(cfg["tol"])
    fg = build_full_generator(g, r)
    gap = spectral_gap_exact(fg)
    em = epsilon_M(r)
    mc = classify(r)
    alphas = None
    if mc.primary is not None:
        try:
            alphas = decay_rates(mc.primary, mc.params[mc.primary])
        except (DomainError, DegenerateSpectrumError):
            alphas = None
    if abs(gap - em) <= tol:
        verdict = "equality"
    elif em <= gap + tol and (alphas is None or gap <= max(alphas) + tol):
        verdict = "bracketed"
    else:
        verdict = "violated"
    resolved = {"graph": graph_echo, "rates": rates_echo, "tol": tol}
    report = {
        "schema": REPORT_SCHEMA,
        "command": "gap",
        "config": resolved,
        "gap": gap,
        "epsilon_minus_m": em,
        "alpha1": None if alphas is None else alphas[0],
        "alpha2": None if alphas is None else alphas[1],
        "family": mc.primary,
        "verdict": verdict,
        "pass": verdict != "violated",
    }
    _write_json(out, report)
    print(
        f"gap: exact {_g17(gap)}, epsilon-M {_g17(em)}, family {mc.primary or 'none'}, "
        f"verdict {verdict}"
    )
    print("PASS" if verdict != "violated" else "FAIL")
    return 0 if verdict != "violated" else 1


def _cmd_prop2(cfg: dict, out: str) -> int:
    specs = cfg["graphs"]
    if not isinstance(specs, list) or len(specs) < 2:
        raise DomainError("prop2 needs a list of at least two graph specs")
    built = [_build_graph(sp) for sp in specs]
    graphs = [g for g, _ in built]
    r, rates_echo = _build_rates(cfg["rates"])
    densities = [float(p) for p in cfg["densities"]]
    t_grid = np.asarray(cfg["t_grid"], dtype=np.float64)
    tail = float(cfg["tail_tol"])
    expect_equal = bool(cfg["expect_equal"])

    gens = [build_full_generator(g, r) for g in graphs]
    curves = {}
    for gi, (g, fg) in enumerate(zip(graphs, gens)):
        for p in densities:
            series = transient_mean_coverage(fg, bernoulli_distribution(g.n, p), t_grid, tail)
            curves[gi, p] = series.values / g.n

    per_p = {}
    for p in densities:
        per_p[p] = max(
            float(np.abs(curves[gi, p] - curves[0, p]).max()) for gi in range(1, len(graphs))
        )
    max_diff = max(per_p.values())
    ok = (max_diff <= float(cfg["tol"])) if expect_equal else (max_diff > float(cfg["diff_floor"]))

    resolved = {
        "graphs": [echo for _, echo in built],
        "rates": rates_echo,
        "densities": densities,
        "t_grid": [float(t) for t in t_grid],
        "tol": float(cfg["tol"]),
        "expect_equal": expect_equal,
        "diff_floor": float(cfg["diff_floor"]),
        "tail_tol": tail,
    }
    report = {
        "schema": REPORT_SCHEMA,
        "command": "prop2",
        "config": resolved,
        "sizes": [g.n for g in graphs],
        "max_density_diff": max_diff,
        "max_density_diff_per_p": {repr(p): d for p, d in per_p.items()},
        "densities_by_graph": {
            str(graphs[gi].n): {repr(p): curves[gi, p] for p in densities}
            for gi in range(len(graphs))
        },
        "pass": ok,
    }
    _write_json(out, report)
    word = "match" if expect_equal else "differ"
    print(
        f"prop2: sizes {[g.n for g in graphs]}, max density diff {_g17(max_diff)}, "
        f"expected to {word}"
    )
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _probe_tables(s: int, n_tables: int, n_constructed: int, rng):
    """The random sweep: half uniform tables, half near-constant tables
    (where the flag condition actually has a chance), plus constructed
    noisy-voter rows that must be flagged."""
    tables = []
    half = n_tables // 2
    for _ in range(half):
        tables.append(("uniform", rng.uniform(0.0, 1.0, s + 1), rng.uniform(0.0, 1.0, s + 1)))
    for _ in range(n_tables - half):
        lam = rng.uniform(0.5, 1.5) + rng.uniform(-0.1, 0.1, s + 1)
        mu = rng.uniform(0.5, 1.5) + rng.uniform(-0.1, 0.1, s + 1)
        tables.append(("near-constant", np.clip(lam, 0.0, None), np.clip(mu, 0.0, None)))
    for _ in range(n_constructed):
        r = make_noisy_voter(
            s, rng.uniform(0.0, 0.5), rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)
        )
        tables.append(("constructed-c1", np.asarray(r.lam), np.asarray(r.mu)))
    return tables


def _cmd_conjecture_probe(cfg: dict, out: str) -> int:
    g, graph_echo = _build_graph(cfg["graph"])
    n_tables = int(cfg["n_tables"])
    n_constructed = int(cfg["n_constructed"])
    tol = float(cfg["tol"])
    seed = int(cfg["seed"])
    if n_tables < 0 or n_constructed < 0:
        raise DomainError("table counts must be >= 0")
    rng = replica_generator(seed, 0)
    tables = _probe_tables(g.s, n_tables, n_constructed, rng)

    resolved = {
        "graph": graph_echo,
        "n_tables": n_tables,
        "n_constructed": n_constructed,
        "tol": tol,
        "seed": seed,
    }
    header = (
        ["index", "kind"]
        + [f"lambda{k}" for k in range(g.s + 1)]
        + [f"mu{k}" for k in range(g.s + 1)]
        + ["gap", "eps_minus_m", "flagged", "is_c1"]
    )
    rows = []
    n_flagged = 0
    counterexamples = []
    for i, (kind, lam, mu) in enumerate(tables):
        r = RateTable(s=g.s, lam=tuple(lam), mu=tuple(mu))
        try:
            gap = spectral_gap_exact(build_full_generator(g, r))
        except NonErgodicError:
            gap = math.nan
        em = epsilon_M(r)
        is_c1 = "C1" in classify(r)
        flagged = math.isfinite(gap) and em > 0.0 and abs(gap - em) <= tol
        if flagged:
            n_flagged += 1
            if not is_c1:
                counterexamples.append(i)
        rows.append((i, kind, *lam, *mu, gap, em, flagged, is_c1))
    _write_csv(out, resolved, header, rows)

    print(
        f"conjecture-probe: {len(tables)} tables on n={g.n} s={g.s}, "
        f"{n_flagged} flagged (gap = eps-M > 0 within {_g17(tol)})"
    )
    if counterexamples:
        print(
            f"  counterexample candidates (flagged but not noisy-voter): "
            f"rows {counterexamples}"
        )
    else:
        print("  every flagged table classifies as noisy voter")
    return 0


def _cmd_simulate(cfg: dict, out: str) -> int:
    g, graph_echo = _build_graph(cfg["graph"])
    r, rates_echo = _build_rates(cfg["rates"])
    init, init_echo = _build_init(cfg["init"], g)
    replicas = int(cfg["replicas"])
    seed = int(cfg["seed"])
    if replicas < 1:
        raise DomainError(f"replicas must be >= 1, got {replicas}")

    resolved = {
        "graph": graph_echo,
        "rates": rates_echo,
        "init": init_echo,
        "replicas": replicas,
        "seed": seed,
    }
    if replicas == 1 and cfg["t_grid"] is None:
        t_max = float(cfg["t_max"])
        resolved["t_max"] = t_max
        traj = simulate(g, r, init, t_max, seed, backend=cfg["backend"])
        rows = list(traj.replay())
        _write_csv(out, resolved, ("t", "site", "new_spin"), rows)
        print(
            f"simulate: {traj.n_events} events to t_end {_g17(traj.t_end)}, "
            f"absorbed: {traj.absorbed}, final coverage "
            f"{traj.final_configuration().coverage}/{g.n}"
        )
        return 0

    if cfg["t_grid"] is not None:
        t_grid = np.asarray(cfg["t_grid"], dtype=np.float64)
    else:
        t_grid = np.linspace(0.0, float(cfg["t_max"]), 51)
    resolved["t_grid"] = [float(t) for t in t_grid]
    est = ensemble_mcf(
        g, r, init, t_grid, replicas, seed, threads=cfg["threads"], backend=cfg["backend"]
    )
    rows = [(t_grid[i], est.mean[i], est.stderr[i]) for i in range(t_grid.size)]
    _write_csv(out, resolved, ("t", "mean_coverage", "stderr"), rows)
    print(
        f"simulate: {replicas} replicas on n={g.n}, {est.n_absorbed} absorbed, "
        f"final mean coverage {_g17(est.mean[-1])}"
    )
    return 0


_HANDLERS = {
    "verify-identities": _cmd_verify_identities,
    "closure": _cmd_closure,
    "mcf-compare": _cmd_mcf_compare,
    "gap": _cmd_gap,
    "prop2": _cmd_prop2,
    "conjecture-probe": _cmd_conjecture_probe,
    "simulate": _cmd_simulate,
}

_HELP = {
    "verify-identities": "check the flip identities (or the four-corner balance) over a configuration sweep",
    "closure": "fit the second-moment closure and compare with the family coefficients",
    "mcf-compare": "mean coverage: closed form vs uniformized exact vs Monte Carlo",
    "gap": "exact spectral gap vs the epsilon-M bound and the decay rates",
    "prop2": "compare product-measure mean densities across graph sizes",
    "conjecture-probe": "random rate-table sweep for gap = epsilon-M > 0",
    "simulate": "run trajectories (event log or ensemble coverage)",
}


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snnss",
        description="verification harness for nearest-neighbor spin systems on regular graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _HANDLERS:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help=f"artifact path (default {name.replace('-', '_')}.{_OUT_EXT[name]})")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--threads", type=int, help="worker threads (fallback: SNNSS_THREADS)")
        p.add_argument("--tol", type=float, help="override the config tolerance")
    return parser


def _merge_config(args) -> dict:
    cfg = copy.deepcopy(_DEFAULTS[args.command])
    if args.config is not None:
        raw = json.loads(Path(args.config).read_text())
        if not isinstance(raw, dict):
            raise DomainError("config file must hold a JSON object")
        schema = raw.pop("schema", CONFIG_SCHEMA)
        if schema != CONFIG_SCHEMA:
            raise DomainError(f"unsupported config schema {schema!r} (expected {CONFIG_SCHEMA!r})")
        for k, v in raw.items():
            if k not in cfg:
                raise DomainError(f"unknown config key {k!r} for command {args.command!r}")
            cfg[k] = v
    for flag in ("seed", "threads", "tol"):
        v = getattr(args, flag)
        if v is not None and flag in cfg:
            cfg[flag] = v
    return cfg


def main(argv=None) -> int:
    args = _make_parser().parse_args(argv)
    out = args.out or f"{args.command.replace('-', '_')}.{_OUT_EXT[args.command]}"
    try:
        cfg = _merge_config(args)
        return _HANDLERS[args.command](cfg, out)
    except ResourceLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (SnnssError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
