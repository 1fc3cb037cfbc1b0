"""Command-line front end: one subcommand per experiment, CSV series plus JSON summaries.

Every CSV starts with ``#`` header lines carrying the package version and the
complete run configuration as JSON, so ``--from-header FILE`` re-runs an
experiment exactly.  Settings come from built-in defaults, then an optional
YAML file (``--config``), then explicit flags.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__, _kernels
from .hilbert import BlockadeConstraint, count_dimension, enumerate_basis, quantum_dimension

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
COMMANDS = ("basis", "spectrum", "algebra", "state", "quench", "scan", "tdvp", "rydberg")

# system sizes of the revival survey (alpha -> {K: N}); the scan lowers N to the
# largest multiple of K whose periodic dimension fits under the dimension cap
REVIVAL_SIZES = {
    1: {2: 24, 3: 24, 4: 24},
    2: {4: 30, 5: 32, 6: 30},
    3: {6: 36, 7: 35, 8: 36},
}
# offset C in the revival frequency sqrt(K/2 + C)
REVIVAL_OFFSET = {"low": -0.15, "high": 0.75}


NON_RESULT_KEYS = ("out", "emit_states", "report", "threads")


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    command: str
    alpha: int = 1
    sites: int = 12
    cell: int | None = None
    boundary: str = "pbc"
    state: str = "K"
    beta: float = 0.65
    tmax: float | None = None
    points: int = 401
    sector: str | None = None
    probe: str = "K"
    targets: list = field(default_factory=list)
    cuts: list = field(default_factory=list)
    seed: int = 0
    samples: int = 0
    theta0: str | None = None
    atoms: int = 16
    v1: float = 9.0
    delta: float = 0.213
    cutoff: float = 3.0
    alphas: list = field(default_factory=lambda: [1, 2, 3])
    dim_cap: int = 30000
    out: list = field(default_factory=list)
    emit_states: str | None = None
    report: str | None = None
    threads: int | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        if "command" not in data:
            raise ConfigError("configuration lacks a command")
        return cls(**data)

    def header_lines(self) -> list[str]:
        # output paths and thread count do not affect results, so they stay out of the echo
        echo = {k: v for k, v in self.to_dict().items() if k not in NON_RESULT_KEYS}
        return [f"scarsim {__version__}", "config: " + json.dumps(echo, sort_keys=True)]

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.boundary not in ("pbc", "obc"):
            raise ConfigError("boundary must be pbc or obc")
        if self.alpha < 0 or int(self.alpha) != self.alpha:
            raise ConfigError("alpha must be a non-negative integer")
        if self.sites < 1:
            raise ConfigError("sites must be positive")
        if self.points < 2:
            raise ConfigError("points must be at least 2")
        if self.samples < 0:
            raise ConfigError("samples must be non-negative")
        needs_cell = self.command in ("algebra", "quench") or (
            self.command in ("spectrum", "state") and self.state_needs_cell()
        )
        if needs_cell:
            if not self.cell:
                raise ConfigError(f"{self.command} needs --cell")
            if self.sites % self.cell:
                raise ConfigError(f"cell {self.cell} does not divide {self.sites} sites")
        if self.command == "tdvp":
            if (self.alpha, self.cell or 4) not in ((1, 4), (2, 4)):
                raise ConfigError("tdvp supports alpha 1 or 2 with cell 4")
            if self.theta0 is not None:
                parse_angles(self.theta0)
        if self.command == "rydberg" and not 4 <= self.atoms <= 24:
            raise ConfigError("rydberg needs 4 <= atoms <= 24")
        if self.tmax is not None and not self.tmax > 0:
            raise ConfigError("tmax must be positive")

    def state_needs_cell(self) -> bool:
        kind = self.probe if self.command == "spectrum" else self.state
        return kind not in ("theta-star", "mps") and not kind.startswith("bits") and not (kind.upper().startswith("Z") and kind[1:].isdigit())


def parse_angles(text: str) -> np.ndarray:
    """Comma-separated angles; a ``pi`` suffix multiplies by pi (``0.25pi``, ``-pi``)."""
    out = []
    for tok in str(text).split(","):
        tok = tok.strip().lower()
        if not tok:
            raise ConfigError(f"empty angle in {text!r}")
        try:
            if tok.endswith("pi"):
                coef = tok[:-2]
                coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
                out.append(coef * math.pi)
            else:
                out.append(float(tok))
        except ValueError as exc:
            raise ConfigError(f"cannot parse angle {tok!r}") from exc
    return np.array(out)


def parse_cut(text) -> int | tuple[int, int]:
    if isinstance(text, (list, tuple)):
        return int(text[0]), int(text[1])
    s = str(text)
    if ":" in s:
        a, b = s.split(":")
        return int(a), int(b)
    return int(s)


def parse_sector(text: str) -> tuple[int, int | None]:
    """``k=INDEX`` or ``k=INDEX,p=+-1``."""
    k = p = None
    for part in text.split(","):
        key, _, val = part.partition("=")
        key = key.strip().lower()
        if key == "k":
            k = int(val)
        elif key == "p":
            p = int(val)
            if p not in (1, -1):
                raise ConfigError("parity must be +1 or -1")
        else:
            raise ConfigError(f"cannot parse sector {text!r}")
    if k is None:
        raise ConfigError(f"sector {text!r} lacks k=")
    return k, p


def read_header_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if body.startswith("config:"):
                return RunConfig.from_dict(json.loads(body[len("config:"):]))
    raise ConfigError(f"{path} carries no configuration header")


# ---------------------------------------------------------------------------
# output helpers


def _json_ready(obj):
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _json_ready(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_json_ready(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_table(path, header_lines, columns: dict) -> None:
    names = list(columns)
    n = len(next(iter(columns.values()))) if columns else 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(names)
        for i in range(n):
            w.writerow([_cell(columns[k][i]) for k in names])


def _cell(x):
    if isinstance(x, (str, np.str_)):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return repr(float(x))


def _outputs(cfg: RunConfig) -> dict:
    """Map positional ``--out`` entries onto the output kinds of a command."""
    kinds = OUT_KINDS[cfg.command]
    if len(cfg.out) > len(kinds):
        raise ConfigError(f"{cfg.command} writes at most {len(kinds)} files ({', '.join(kinds)})")
    return dict(zip(kinds, cfg.out))


def _basis(cfg: RunConfig, alpha=None, sites=None, boundary=None):
    return enumerate_basis(BlockadeConstraint(cfg.alpha if alpha is None else alpha,
                                              cfg.sites if sites is None else sites,
                                              cfg.boundary if boundary is None else boundary))


def _state(cfg: RunConfig, basis, kind: str, algebra=None):
    from .states import build_initial_state

    theta = parse_angles(cfg.theta0) if cfg.theta0 else None
    bits = kind[5:] if kind.startswith("bits:") else None
    if bits is not None:
        kind = "bits"
    return build_initial_state(basis, kind, cfg.cell, beta=cfg.beta, theta=theta, bits=bits, algebra=algebra)


# ---------------------------------------------------------------------------
# commands


def cmd_basis(cfg: RunConfig) -> dict:
    constraint = BlockadeConstraint(cfg.alpha, cfg.sites, cfg.boundary)
    dim = count_dimension(constraint)
    summary = {"alpha": cfg.alpha, "sites": cfg.sites, "boundary": cfg.boundary, "dimension": dim,
               "quantum_dimension": quantum_dimension(cfg.alpha) if cfg.alpha else 2.0}
    outs = _outputs(cfg)
    if cfg.emit_states:
        basis = enumerate_basis(constraint)
        write_table(cfg.emit_states, cfg.header_lines(), {
            "ordinal": np.arange(basis.dim),
            "bitmask": [hex(int(s)) for s in basis.states],
            "occupation": basis.occupation_strings(),
        })
    if "summary" in outs:
        write_json(outs["summary"], summary)
    return summary


def _spaces(cfg: RunConfig, basis):
    from .symmetry import build_momentum_sector, build_semimomentum_block

    if cfg.sector is None:
        return None
    if not basis.periodic:
        raise ConfigError("sector selection needs periodic boundaries")
    k, p = parse_sector(cfg.sector)
    return [build_momentum_sector(basis, k) if p is None else build_semimomentum_block(basis, abs(k), p)]


def cmd_spectrum(cfg: RunConfig) -> dict:
    from .spectrum import (diagonalize_all, diagonalize_sector, eigenstate_entropy_profile,
                           eigenstate_overlap_profile, identify_scar_towers)

    basis = _basis(cfg)
    if cfg.sector in (None, "momentum", "semimomentum"):
        eigs = diagonalize_all(basis, cfg.sector or "momentum")
    else:
        eigs = [diagonalize_sector(s) for s in _spaces(cfg, basis)]
    probe = _state(cfg, basis, cfg.probe)
    profile = eigenstate_overlap_profile(eigs, probe)
    summary = {"alpha": cfg.alpha, "sites": cfg.sites, "cell": cfg.cell, "probe": cfg.probe,
               "sectors": [e.label for e in eigs], "n_eigenstates": len(profile)}
    if cfg.cell:
        towers = identify_scar_towers(profile, cfg.cell, cfg.sites)
        summary["towers"] = towers.as_dict()
    outs = _outputs(cfg)
    if "overlaps" in outs:
        rec = profile.records()
        write_table(outs["overlaps"], cfg.header_lines(), {
            "energy": [r[0] for r in rec], "overlap": [r[1] for r in rec], "sector": [r[2] for r in rec]})
    if "entropy" in outs:
        ent = eigenstate_entropy_profile(eigs, K=cfg.cell)
        write_table(outs["entropy"], cfg.header_lines(), {
            "energy": [r[0] for r in ent], "entropy": [r[1] for r in ent], "sector": [r[2] for r in ent]})
    if "summary" in outs:
        write_json(outs["summary"], summary)
    return summary


def cmd_algebra(cfg: RunConfig) -> dict:
    from .operators import algebra_closure_residual, build_algebra
    from .states import extremal_eigvec

    basis = _basis(cfg)
    alg = build_algebra(basis, cfg.cell)
    summary = {"alpha": cfg.alpha, "sites": cfg.sites, "cell": cfg.cell,
               "residuals": {r: algebra_closure_residual(alg, r) for r in ("zx", "yz", "xy")}}
    for name, op in (("j_y", alg.j_y), ("j_z", alg.j_z)):
        summary[f"{name}_ground"] = extremal_eigvec(op, "min")[0]
        summary[f"{name}_ceiling"] = extremal_eigvec(op, "max")[0]
    if cfg.report:
        write_json(cfg.report, summary)
    for path in _outputs(cfg).values():
        write_json(path, summary)
    return summary


def cmd_state(cfg: RunConfig) -> dict:
    basis = _basis(cfg)
    psi = _state(cfg, basis, cfg.state)
    amps = psi.amplitudes
    summary = {"alpha": cfg.alpha, "sites": cfg.sites, "cell": cfg.cell, "state": cfg.state,
               "dimension": basis.dim, "norm": psi.norm, "support": int(np.count_nonzero(np.abs(amps) > 1e-14))}
    outs = _outputs(cfg)
    if "amplitudes" in outs:
        write_table(outs["amplitudes"], cfg.header_lines(), {
            "ordinal": np.arange(basis.dim), "bitmask": [hex(int(s)) for s in basis.states],
            "occupation": basis.occupation_strings(), "re": amps.real, "im": np.imag(amps)})
    if "summary" in outs:
        write_json(outs["summary"], summary)
    return summary


def _times(cfg: RunConfig, K):
    from .dynamics import default_t_est

    tmax = cfg.tmax if cfg.tmax is not None else 3.0 * default_t_est(K or 2)
    return np.linspace(0.0, tmax, cfg.points)


def cmd_quench(cfg: RunConfig) -> dict:
    from .dynamics import evolve, quench_series, revival_metrics
    from .operators import build_hamiltonian
    from .spectrum import half_chain_cut

    basis = _basis(cfg)
    psi = _state(cfg, basis, cfg.state)
    times = _times(cfg, cfg.cell)
    targets = {name: _state(cfg, basis, name) for name in cfg.targets}
    cuts = [parse_cut(c) for c in cfg.cuts] or [half_chain_cut(basis, cfg.cell)]
    traj = evolve(build_hamiltonian(basis), psi, times)
    series = quench_series(traj, targets, cuts, meta={"K": cfg.cell})
    summary = {"alpha": cfg.alpha, "sites": cfg.sites, "cell": cfg.cell, "state": cfg.state}
    try:
        summary["revival"] = revival_metrics(series, cfg.alpha, K=cfg.cell).as_dict()
    except ValueError as exc:
        summary["revival"] = {"error": str(exc)}
    outs = _outputs(cfg)
    if "series" in outs:
        write_table(outs["series"], cfg.header_lines(), series.columns())
    if "summary" in outs:
        write_json(outs["summary"], summary)
    return summary


def revival_size(alpha: int, K: int, dim_cap: int = 30000) -> int:
    """Largest multiple of ``K`` not above the survey size whose periodic dimension fits the cap."""
    n = (REVIVAL_SIZES[alpha][K] // K) * K
    while n >= 2 * K:
        if count_dimension(BlockadeConstraint(alpha, n)) <= dim_cap:
            return n
        n -= K
    raise ConfigError(f"no admissible size for alpha={alpha}, K={K} under dimension {dim_cap}")


def revival_frequency(alpha: int, K: int) -> float:
    c = REVIVAL_OFFSET["high"] if K == 2 * alpha + 2 else REVIVAL_OFFSET["low"]
    return math.sqrt(K / 2 + c)


def revival_point(basis, psi, K: int, periods: float = 3.0, per_period: int = 200, seed: int = 0,
                  samples: int = 0) -> dict:
    """Revival metrics of one state, propagated spectrally within its momentum support."""
    from .dynamics import (default_times, evolve_spectral, quench_series, random_baseline, revival_metrics,
                           sector_eigensystems, support_momenta)

    times = default_times(K, periods, per_period)
    eigs = sector_eigensystems(basis, support_momenta(psi))
    series = quench_series(evolve_spectral(eigs, psi, times), meta={"K": K})
    out = revival_metrics(series, basis.alpha, K=K).as_dict()
    if samples:
        base = [revival_metrics(s, basis.alpha, K=K) for s in random_baseline(basis, eigs, samples, seed, times)]
        ratios = np.array([b.ratio for b in base])
        out["random"] = {"samples": samples, "ratio_mean": float(ratios.mean()), "ratio_max": float(ratios.max())}
    return out


def cmd_scan(cfg: RunConfig) -> dict:
    from .operators import build_algebra

    rows = []
    for alpha in cfg.alphas:
        if alpha not in REVIVAL_SIZES:
            raise ConfigError(f"no survey sizes for alpha={alpha}")
        for K in sorted(REVIVAL_SIZES[alpha]):
            n = revival_size(alpha, K, cfg.dim_cap)
            basis = enumerate_basis(BlockadeConstraint(alpha, n))
            alg = build_algebra(basis, K)
            for kind in ("K", "GSy", f"Z{K}"):
                psi = _state(dataclasses.replace(cfg, cell=K), basis, kind, algebra=alg)
                samples = cfg.samples if kind == "K" else 0
                m = revival_point(basis, psi, K, seed=cfg.seed, samples=samples)
                rows.append({"alpha": alpha, "K": K, "sites": n, "dimension": basis.dim, "state": kind,
                             "omega_T1": revival_frequency(alpha, K) * m["T1"], **m})
    summary = {"rows": rows, "dim_cap": cfg.dim_cap}
    for path in _outputs(cfg).values():
        write_json(path, summary)
    return summary


def cmd_tdvp(cfg: RunConfig) -> dict:
    from . import semiclassical as sc

    K = cfg.cell or 4
    theta0 = parse_angles(cfg.theta0) if cfg.theta0 else np.array([0.0, 0.0, math.pi / 4, math.pi / 2])
    if theta0.size != K:
        raise ConfigError(f"theta0 needs {K} angles")
    tmax = cfg.tmax if cfg.tmax is not None else 20.0
    orbit = sc.integrate_orbit(theta0, cfg.alpha, tmax, K=K, n_points=cfg.points)
    ent = sc.trajectory_entropy(orbit)
    cols = {"t": orbit.times}
    for j in range(K):
        cols[f"theta{j + 1}"] = orbit.thetas[:, j]
    occ = np.array([sc.cell_occupation(th, cfg.alpha, K) for th in orbit.thetas])
    for j in range(K):
        cols[f"n{j + 1}"] = occ[:, j]
    for c, s in ent.items():
        cols[f"entropy_cut{c}"] = s
    summary = {"alpha": cfg.alpha, "cell": K, "theta0": theta0, "period": orbit.period, "closure": orbit.closure,
               "max_entropy": {str(c): float(s.max()) for c, s in ent.items()}}
    if orbit.period is not None and cfg.alpha == 1:
        stab = sc.orbit_period_and_stability(orbit)
        summary.update({"floquet_exponents": stab.exponents, "floquet_multipliers": stab.multipliers,
                        "reversal_defect": sc.reversal_defect(orbit)})
    outs = _outputs(cfg)
    if "orbit" in outs:
        write_table(outs["orbit"], cfg.header_lines(), cols)
    if "summary" in outs:
        write_json(outs["summary"], summary)
    return summary


def cmd_rydberg(cfg: RunConfig) -> dict:
    from . import rydberg as ry

    params = ry.RydbergParams(delta=cfg.delta, v1=cfg.v1, cutoff=cfg.cutoff)
    geom = ry.triangular_ladder_geometry(cfg.atoms)
    psi = ry.gs_y_initial_state(cfg.atoms, cfg.cell or 4)
    tmax = cfg.tmax if cfg.tmax is not None else 12.0
    cmp = ry.compare_effective(geom, params, psi, np.linspace(0.0, tmax, cfg.points), K=cfg.cell or 4)
    summary = {"atoms": cfg.atoms, "v1_over_omega": cfg.v1, "delta_over_omega": cfg.delta, "cutoff": cfg.cutoff,
               "blockade_radius": params.blockade_radius,
               "max_gap": {k: cmp.gap(k) for k in cmp.effective.observables},
               "max_P_W": {"array": float(cmp.experimental.observables["P_W"].max()),
                           "chain": float(cmp.effective.observables["P_W"].max())}}
    outs = _outputs(cfg)
    if "series" in outs:
        write_table(outs["series"], cfg.header_lines(), cmp.columns())
    if "summary" in outs:
        write_json(outs["summary"], summary)
    return summary


HANDLERS = {
    "basis": cmd_basis, "spectrum": cmd_spectrum, "algebra": cmd_algebra, "state": cmd_state,
    "quench": cmd_quench, "scan": cmd_scan, "tdvp": cmd_tdvp, "rydberg": cmd_rydberg,
}


def run(cfg: RunConfig) -> dict:
    cfg.validate()
    _kernels.set_threads(cfg.threads)
    return HANDLERS[cfg.command](cfg)


# ---------------------------------------------------------------------------
# argument parsing


def _csv_list(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


OUT_KINDS = {
    "basis": ("summary",), "spectrum": ("summary", "overlaps", "entropy"), "algebra": ("summary",),
    "state": ("amplitudes", "summary"), "quench": ("series", "summary"), "scan": ("summary",),
    "tdvp": ("orbit", "summary"), "rydberg": ("series", "summary"),
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scarsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"scarsim {__version__}")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", help="YAML file with run settings")
        sp.add_argument("--from-header", dest="from_header", help="re-run the configuration echoed in a CSV header")
        sp.add_argument("--alpha", type=int)
        sp.add_argument("--sites", type=int)
        sp.add_argument("--cell", type=int)
        sp.add_argument("--boundary", choices=("pbc", "obc"))
        kinds = OUT_KINDS.get(sp.prog.split()[-1], ())
        sp.add_argument("--out", type=_csv_list, help=f"comma-separated output files, in order: {', '.join(kinds)}")
        sp.add_argument("--threads", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--points", type=int)
        sp.add_argument("--tmax", type=float)
        return sp

    common(sub.add_parser("basis", help="constrained basis size and states")).add_argument(
        "--emit-states", dest="emit_states")
    sp = common(sub.add_parser("spectrum", help="sector-resolved spectrum, overlaps and towers"))
    sp.add_argument("--sector")
    sp.add_argument("--all-sectors", dest="sector", action="store_const", const=None)
    sp.add_argument("--probe")
    sp.add_argument("--beta", type=float)
    common(sub.add_parser("algebra", help="collective-spin algebra residuals")).add_argument("--report")
    sp = common(sub.add_parser("state", help="initial-state amplitudes"))
    sp.add_argument("--kind", dest="state")
    sp.add_argument("--beta", type=float)
    sp.add_argument("--theta0")
    sp = common(sub.add_parser("quench", help="quench time series"))
    sp.add_argument("--state")
    sp.add_argument("--beta", type=float)
    sp.add_argument("--theta0")
    sp.add_argument("--targets", type=_csv_list)
    sp.add_argument("--cuts", type=_csv_list)
    sp = common(sub.add_parser("scan", help="revival survey over (alpha, K)"))
    sp.add_argument("--alphas", type=lambda s: [int(x) for x in _csv_list(s)])
    sp.add_argument("--samples", type=int)
    sp.add_argument("--dim-cap", dest="dim_cap", type=int)
    common(sub.add_parser("tdvp", help="variational orbit")).add_argument("--theta0")
    sp = common(sub.add_parser("rydberg", help="array emulation versus the chain model"))
    sp.add_argument("--atoms", type=int)
    sp.add_argument("--v1-over-omega", dest="v1", type=float)
    sp.add_argument("--delta-over-omega", dest="delta", type=float)
    sp.add_argument("--cutoff", type=float)
    return p


def config_from_args(argv=None) -> RunConfig:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.print_help()
        raise SystemExit(EXIT_CONFIG)
    given = {k: v for k, v in vars(ns).items() if v is not None and k not in ("config", "from_header")}
    if ns.from_header:
        base = read_header_config(ns.from_header).to_dict()
        if base["command"] != ns.command:
            raise ConfigError(f"header belongs to {base['command']!r}, not {ns.command!r}")
    else:
        base = {"command": ns.command}
    if ns.config:
        loaded = yaml.safe_load(Path(ns.config).read_text(encoding="utf-8")) or {}
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a mapping")
        base.update({k.replace("-", "_"): v for k, v in loaded.items()})
    base.update(given)
    return RunConfig.from_dict(base)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        summary = run(cfg)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        # LinAlgError derives from ValueError, so this clause must come first
        _fail("numeric", exc)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, KeyError, TypeError, OSError, yaml.YAMLError) as exc:
        _fail("config", exc)
        return EXIT_CONFIG
    print(json.dumps(_json_ready(summary), sort_keys=True))
    return EXIT_OK


def _fail(kind: str, exc: Exception) -> None:
    print(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
