"""Batch front-end: ``lagrad <command> [--config FILE] [--seed N] [--out DIR] ...``.

Exit codes: 0 pass, 2 configuration error, 3 numerical check failed,
4 calibration unstable or out of range.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CALIBRATION = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


class NumericCheckError(RuntimeError):
    pass


# ------------------------------------------------------------------ config

_AXIS = {"type": "object", "required": ["min", "max", "count"], "additionalProperties": False,
         "properties": {"min": {"type": "number"}, "max": {"type": "number"},
                        "count": {"type": "integer", "minimum": 1}}}
_POS = {"type": "number", "exclusiveMinimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 1, "maximum": 3},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "workers": {"type": "integer", "minimum": 1},
        "input": {"type": "string"},
        "preset": {
            "type": "object", "additionalProperties": False, "required": ["kind"],
            "properties": {
                "kind": {"enum": ["gaussian", "random", "zero", "shifted"]},
                "mean": {"type": "array", "items": {"type": "number"}},
                "cov": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
            },
        },
        "grid": {"type": "object", "additionalProperties": False,
                 "properties": {"shape": {"type": "integer", "minimum": 4},
                                "half_width": _POS}},
        "forward": {"type": "object", "additionalProperties": False,
                    "properties": {"chart": {"enum": ["flat", "torus"]},
                                   "axes": {"type": "object", "additionalProperties": _AXIS},
                                   "order": {"type": "integer", "minimum": 8, "maximum": 128},
                                   "angles": {"type": "integer", "minimum": 4},
                                   "offsets": {"type": "integer", "minimum": 4},
                                   "p_half_width": _POS}},
        "invert": {"type": "object", "additionalProperties": False,
                   "properties": {"engine": {"enum": ["fbp", "literal"]},
                                  "constant": {"oneOf": [{"type": "number"},
                                                         {"const": "calibrate"}]},
                                  "angles": {"type": "integer", "minimum": 4},
                                  "offsets": {"type": "integer", "minimum": 4},
                                  "p_half_width": _POS}},
        "check": {"type": "object", "additionalProperties": False,
                  "properties": {"points": {"type": "integer", "minimum": 1},
                                 "invariance": {"type": "integer", "minimum": 0},
                                 "count": {"type": "integer", "minimum": 1},
                                 "pairs": {"type": "integer", "minimum": 1},
                                 "n_values": {"type": "array", "minItems": 1,
                                              "items": {"type": "integer", "minimum": 1,
                                                        "maximum": 3}},
                                 "corrupt": _POS}},
        "calibrate": {"type": "object", "additionalProperties": False,
                      "properties": {"resolution": {"type": "object"},
                                     "spread_tol": _POS}},
        "divergence": {"type": "object", "additionalProperties": False,
                       "properties": {"N_list": {"type": "array", "minItems": 2,
                                                 "items": {"type": "integer", "minimum": 1}}}},
        "tolerances": {"type": "object", "additionalProperties": _POS},
    },
}

DEFAULT_TOLERANCES = {
    "forward_oracle": 1e-6,
    "invert_fourier_n1": 5e-2,
    "invert_fourier_n2": 1e-1,
    "invert_torus": 5e-2,
    "invert_riesz": 1e-1,
    "calibration_torus_literal": 5e-2,
    "calibration_fourier": 5e-2,
    "calibration_spread": 2e-2,
    "divergence_l2_increment": 1e-3,
}


def load_config(path) -> dict:
    import jsonschema

    if path is None:
        cfg = {}
    else:
        try:
            cfg = json.loads(Path(path).read_text())
        except FileNotFoundError as e:
            raise ConfigError(f"config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as e:
        loc = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {loc}: {e.message}") from e
    return cfg


def budgets(cfg: dict) -> dict:
    from .suites import BUDGETS

    out = dict(BUDGETS)
    out.update(DEFAULT_TOLERANCES)
    out.update(cfg.get("tolerances", {}))
    return out


def resolve_workers(arg, cfg: dict) -> int:
    if arg is not None:
        w = arg
    elif "workers" in cfg:
        w = cfg["workers"]
    else:
        env = os.environ.get("LAGRAD_WORKERS")
        if env is None:
            return 1
        try:
            w = int(env)
        except ValueError as e:
            raise ConfigError(f"LAGRAD_WORKERS must be an integer, got {env!r}") from e
    if w < 1:
        raise ConfigError("worker count must be at least 1")
    return int(w)


# ------------------------------------------------------------------ hashing

def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def git_blob_hash(data: bytes) -> str:
    """SHA-1 of ``blob <len>\\0<data>``, as git computes it."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(canonical_json(cfg)).hexdigest()


def input_hash(cfg: dict) -> str:
    parts = []
    if "input" in cfg:
        p = Path(cfg["input"])
        parts.append(p.read_bytes())
        side = p.with_suffix(p.suffix + ".json")
        if side.exists():
            parts.append(side.read_bytes())
    parts.append(canonical_json(cfg.get("preset")))
    return git_blob_hash(b"".join(parts))


# ------------------------------------------------------------------ presets

def preset_function(cfg: dict, m: int, seed: int):
    """The oracle Gaussian on R^m named by the config.

    None when the config names an input file but no preset; the standard
    Gaussian when it names neither.
    """
    from .gaussian import GaussianFunction
    from .inversion import oracle_set

    spec = cfg.get("preset")
    if spec is None:
        if "input" in cfg:
            return None
        spec = {"kind": "gaussian"}
    kind = spec["kind"]
    if kind == "gaussian":
        return GaussianFunction.standard(m)
    if kind == "zero":
        return "zero"
    if kind == "random":
        return oracle_set(m, 1, seed)[0]
    mean = np.asarray(spec.get("mean", [0.0] * m), dtype=float)
    cov = np.asarray(spec.get("cov", np.eye(m)), dtype=float)
    if mean.shape != (m,) or cov.shape != (m, m):
        raise ConfigError(f"shifted preset needs mean of length {m} and a {m}x{m} cov")
    if np.any(np.linalg.eigvalsh(0.5 * (cov + cov.T)) <= 0):
        raise ConfigError("preset covariance must be positive definite")
    return GaussianFunction.from_mean_cov(mean, cov)


def _zero_fn(z):
    return np.zeros(np.asarray(z).shape[:-1], dtype=complex)


# ------------------------------------------------------------------ reports

class Report:
    def __init__(self, command: str, cfg: dict, seed: int, out: Path):
        self.command, self.cfg, self.seed, self.out = command, cfg, seed, out
        self.rows: list[dict] = []
        self.summary: dict = {}
        self.artifacts: list[str] = []

    def add(self, case: str, value: float, budget: float | None, suite: str = "") -> bool:
        ok = True if budget is None else bool(np.isfinite(value) and value <= budget)
        self.rows.append({"suite": suite or self.command, "case": case, "value": float(value),
                          "budget": budget, "passed": ok})
        return ok

    def add_rows(self, rows) -> None:
        for r in rows:
            self.rows.append(r.to_dict())

    @property
    def passed(self) -> bool:
        return all(r["passed"] for r in self.rows)

    def write(self) -> dict:
        self.out.mkdir(parents=True, exist_ok=True)
        used = sorted({r["budget"] for r in self.rows if r["budget"] is not None})
        doc = {
            "command": self.command,
            "version": __version__,
            "seed": self.seed,
            "config": self.cfg,
            "config_hash": config_hash({"config": self.cfg, "seed": self.seed}),
            "input_hash": input_hash(self.cfg),
            "tolerance_budgets": budgets(self.cfg),
            "budgets_applied": used,
            "summary": self.summary,
            "artifacts": self.artifacts,
            "rows": self.rows,
            "passed": self.passed,
        }
        (self.out / f"{self.command}_report.json").write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "case", "value", "budget", "passed"])
        for r in self.rows:
            w.writerow([r["suite"], r["case"], repr(r["value"]),
                        "" if r["budget"] is None else repr(r["budget"]), r["passed"]])
        (self.out / f"{self.command}_report.csv").write_text(buf.getvalue())
        return doc

    def echo(self) -> None:
        for r in self.rows:
            flag = "PASS" if r["passed"] else "FAIL"
            b = "" if r["budget"] is None else f" (budget {r['budget']:.1e})"
            print(f"[{flag}] {r['suite']}: {r['case']} = {r['value']:.3e}{b}")


def _write_plot_script(out: Path, csv_name: str, x: str, ys: list[str], title: str,
                       logy: bool = False) -> str:
    name = csv_name.replace(".csv", "_plot.py")
    lines = [
        "import csv",
        "import matplotlib.pyplot as plt",
        "",
        f"with open({csv_name!r}) as fh:",
        "    rows = list(csv.DictReader(fh))",
        f"x = [float(r[{x!r}]) for r in rows]",
        "fig, ax = plt.subplots()",
    ]
    for y in ys:
        lines.append(f"ax.plot(x, [float(r[{y!r}]) for r in rows], 'o-', label={y!r})")
    lines += [f"ax.set_xlabel({x!r})", f"ax.set_title({title!r})", "ax.legend()"]
    if logy:
        lines.append("ax.set_yscale('log')")
    lines.append(f"fig.savefig({name.replace('.py', '.png')!r}, dpi=120)")
    (out / name).write_text("\n".join(lines) + "\n")
    return name


# ------------------------------------------------------------------ commands

def _axis_values(spec) -> np.ndarray:
    return np.linspace(spec["min"], spec["max"], spec["count"])


def cmd_forward(cfg: dict, seed: int, out: Path, workers: int) -> Report:
    from .determinantal import chart_variables
    from .gaussian import radon_flat_gaussian
    from .geometry import FlatChartPoint
    from .inversion import angle_grid, half_step_grid, torus_gaussian_exact
    from .radon import Quadrature, RadonSamples, radon_flat_numeric, torus_radon

    n = cfg.get("n", 1)
    fw = cfg.get("forward", {})
    chart = fw.get("chart", "flat")
    G = preset_function(cfg, 2 * n, seed)
    if G is None:
        raise ConfigError("forward needs a preset")
    f = _zero_fn if G == "zero" else G
    order = fw.get("order", {1: 64, 2: 48, 3: 24}[n])
    rep = Report("forward", cfg, seed, out)
    if chart == "torus":
        if n != 1:
            raise ConfigError("torus forward sampling is implemented for n = 1")
        phi = angle_grid(fw.get("angles", 180))
        p = half_step_grid(fw.get("offsets", 128), fw.get("p_half_width", 8.0))
        samples = torus_radon(f, phi, p, order=order)
        exact = np.zeros_like(samples.values) if G == "zero" else \
            torus_gaussian_exact(G, phi[:, None], p[None, :])
    else:
        names = chart_variables(n)
        axes_cfg = fw.get("axes", {})
        unknown = set(axes_cfg) - set(names)
        if unknown:
            raise ConfigError(f"unknown chart axes {sorted(unknown)}; expected {names}")
        t_count = 5 if n == 1 else 3
        defaults = {v: ({"min": -3.0, "max": 3.0, "count": 13 if n == 1 else 7}
                        if v.startswith("tau") else {"min": -0.5, "max": 0.5, "count": t_count})
                    for v in names}
        axes = [_axis_values(axes_cfg.get(v, defaults[v])) for v in names]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(names))
        iu = np.triu_indices(n)
        vals = np.empty(mesh.shape[0], dtype=complex)
        exact = np.empty(mesh.shape[0], dtype=complex)
        quad = Quadrature(order=order)
        for k, x in enumerate(mesh):
            T = np.zeros((n, n))
            T[iu] = x[: len(iu[0])]
            T = T + np.triu(T, 1).T
            tau = x[len(iu[0]):]
            vals[k] = radon_flat_numeric(f, FlatChartPoint(T, tau), quad)
            exact[k] = 0.0 if G == "zero" else complex(radon_flat_gaussian(G, T, tau))
        shape = tuple(a.size for a in axes)
        samples = RadonSamples("flat", n, axes, vals.reshape(shape),
                               {"variables": names})
        exact = exact.reshape(shape)
    scale = np.max(np.abs(exact))
    err = float(np.max(np.abs(samples.values - exact)) / (scale if scale > 0 else 1.0))
    b = budgets(cfg)
    rep.add(f"numeric vs closed form ({chart} chart, {samples.values.size} samples)",
            err, b["forward_oracle"])
    gf = samples.to_grid()
    gf.meta.update(preset=cfg.get("preset"), seed=seed, quadrature_order=order,
                   config_hash=config_hash({"config": cfg, "seed": seed}))
    gf.save(out / "samples.bin")
    rep.artifacts += ["samples.bin", "samples.bin.json"]
    rep.summary = {"chart": chart, "n": n, "shape": list(samples.values.shape),
                   "max_abs": float(np.max(np.abs(samples.values)))}
    return rep


def _spatial(cfg: dict, m: int, default_shape: int, default_L: float):
    from .grid import GridField

    g = cfg.get("grid", {})
    return GridField.centered((g.get("shape", default_shape),) * m, g.get("half_width", default_L))


def cmd_invert(cfg: dict, seed: int, out: Path, workers: int, method: str) -> Report:
    from .grid import GridField
    from .inversion import (RadonSamples, angle_grid, calibrate, half_step_grid, interior_mask,
                            invert_fourier, invert_riesz, invert_torus, relative_l2,
                            riesz_field, torus_gaussian_exact, RIESZ_CONSTANT_N2)

    b = budgets(cfg)
    rep = Report("invert", cfg, seed, out)
    n = cfg.get("n", 2 if method == "riesz" else 1)
    G = preset_function(cfg, 2 * n, seed)
    if G == "zero":
        raise ConfigError("inversion error is relative; use a nonzero preset")
    mask = None
    if method == "fourier":
        if "input" in cfg:
            raise ConfigError("the fourier route evaluates closed-form data on its own "
                              "chart nodes; give a preset, not an input file")
        if G is None:
            raise ConfigError("fourier inversion needs a preset")
        sp = _spatial(cfg, 2 * n, 64 if n == 1 else 16, 10.0 if n == 1 else 6.0)
        rec = invert_fourier(G, sp, workers=workers)
        key = f"invert_fourier_n{min(n, 2)}"
    elif method == "torus":
        if n != 1:
            raise ConfigError("the torus route is implemented for n = 1")
        iv = cfg.get("invert", {})
        if "input" in cfg:
            data = RadonSamples.from_grid(GridField.load(cfg["input"]))
            if data.chart != "torus":
                raise ConfigError(f"torus inversion needs torus samples, got {data.chart!r}")
        elif G is not None:
            phi = angle_grid(iv.get("angles", 180))
            p = half_step_grid(iv.get("offsets", 128), iv.get("p_half_width", 8.0))
            data = RadonSamples("torus", 1, [phi, p], torus_gaussian_exact(G, phi[:, None], p[None, :]))
        else:
            raise ConfigError("torus inversion needs an input file or a preset")
        sp = _spatial(cfg, 2, 64, 4.0)
        engine = iv.get("engine", "fbp")
        const = iv.get("constant")
        if engine == "literal" and const == "calibrate":
            cal = calibrate("torus-literal", seed=seed,
                            spread_tol=cfg.get("calibrate", {}).get("spread_tol", b["calibration_spread"]))
            const = cal.value
            rep.summary["calibration"] = cal.to_dict()
        rec = invert_torus(data, sp, engine, const)
        key = "invert_torus"
        if engine == "literal":
            # the averaged formula loses accuracy where lines leave the sampled band
            mask = np.linalg.norm(sp.points(), axis=-1) < 2.5
    elif method == "riesz":
        if n != 2:
            raise ConfigError("the point-average route is implemented for n = 2")
        if "input" in cfg:
            av = GridField.load(cfg["input"])
            if av.m != 4:
                raise ConfigError("point-average input must be a 4-D grid")
            sp = av.with_values(np.zeros(av.shape))
        elif G is not None:
            sp = _spatial(cfg, 4, 32, 5.0)
            av = riesz_field(G, sp)
        else:
            raise ConfigError("riesz inversion needs an input file or a preset")
        const = cfg.get("invert", {}).get("constant", RIESZ_CONSTANT_N2)
        if const == "calibrate":
            cal = calibrate("riesz", seed=seed,
                            spread_tol=cfg.get("calibrate", {}).get("spread_tol", b["calibration_spread"]))
            const = cal.value
            rep.summary["calibration"] = cal.to_dict()
        rec = invert_riesz(av, 2, const)
        rec = rec.with_values(np.nan_to_num(rec.values))
        mask = interior_mask(sp.shape)
        key = "invert_riesz"
    else:
        raise ConfigError(f"unknown inversion method {method!r}")
    rec.meta.update(method=method, seed=seed)
    rec.save(out / "reconstruction.bin")
    rep.artifacts += ["reconstruction.bin", "reconstruction.bin.json"]
    rep.summary.update(method=method, n=n, shape=list(rec.shape))
    if G is not None:
        rep.add(f"{method} relative L2 error vs oracle", relative_l2(rec, G, mask), b[key])
    return rep


def cmd_check(cfg: dict, seed: int, out: Path, workers: int, suite: str) -> Report:
    from .gaussian import GaussianFunction
    from .suites import (SUITES, determinantal_suite, equivariance_suite, kernel_suite,
                         weil_suite)

    if suite not in SUITES + ("all",):
        raise ConfigError(f"unknown suite {suite!r}")
    chk = cfg.get("check", {})
    b = budgets(cfg)
    rep = Report("check", cfg, seed, out)
    todo = SUITES if suite == "all" else (suite,)
    if "determinantal" in todo:
        n_values = tuple(chk.get("n_values", [2, 3]))
        if min(n_values) < 2:
            raise ConfigError("the determinantal system has 3x3 minors only for n >= 2")
        G = preset_function(cfg, 2 * n_values[0], seed)
        if G == "zero":
            raise ConfigError("residuals are relative; use a nonzero preset")
        G = G if G is not None else GaussianFunction.standard(2 * n_values[0])
        rep.add_rows(determinantal_suite(G, n_values, chk.get("points", 3),
                                         chk.get("invariance", 2), seed, chk.get("corrupt"), b))
    if "equivariance" in todo:
        rep.add_rows(equivariance_suite(chk.get("count", 100), seed=seed, budgets=b))
    if "weil" in todo:
        rep.add_rows(weil_suite(seed, chk.get("pairs", 50), b))
    if "kernel" in todo:
        rep.add_rows(kernel_suite(seed, chk.get("count", 20) if suite == "kernel" else 20, b))
    rep.summary = {"suite": suite, "rows": len(rep.rows),
                   "failed": sum(not r["passed"] for r in rep.rows)}
    return rep


def cmd_weil_demo(cfg: dict, seed: int, out: Path, workers: int) -> Report:
    from .gaussian import GaussianFunction
    from .weil import (KINDS, WeilOperator, cocycle_check, grid_unitarity, random_word,
                       sample_gaussian, symmetric_grid, weil_apply, weil_apply_word)

    b = budgets(cfg)
    rep = Report("weil-demo", cfg, seed, out)
    rng = np.random.default_rng(seed)
    grid = symmetric_grid((cfg.get("grid", {}).get("shape", 256),),
                          cfg.get("grid", {}).get("half_width", 10.0))
    G = GaussianFunction.standard(1)
    f = sample_gaussian(G, grid)
    # the Fourier generator fixes the standard Gaussian up to the phase sqrt(i)
    Jf = weil_apply(WeilOperator("J", None, 1), f)
    rep.add("J on standard Gaussian equals sqrt(i) times it",
            float(np.max(np.abs(Jf.values - np.sqrt(1j) * f.values))), b["weil_unitarity"])
    prof = [("x", [repr(float(x)) for x in grid.axes()[0]]),
            ("f", [repr(float(abs(v))) for v in f.values])]
    for k in KINDS:
        W = random_word(1, rng, 1, kinds=(k,))[0]
        out_g = weil_apply(W, f)
        exact = sample_gaussian(weil_apply(W, G), grid)
        rep.add(f"{k}: grid unitarity", grid_unitarity(W, f), b["weil_unitarity"])
        rep.add(f"{k}: grid vs closed form (max abs)",
                float(np.max(np.abs(out_g.values - exact.values))), b["weil_unitarity"])
        prof.append((k, [repr(float(abs(v))) for v in out_g.values]))
    r, s = 0.3, -0.4
    a = weil_apply_word([WeilOperator("shift", [r]), WeilOperator("modulate", [s])], G)
    c = weil_apply_word([WeilOperator("modulate", [s]), WeilOperator("shift", [r])], G)
    phase = complex(a.inner(c) / c.inner(c))
    rep.add("Heisenberg commutation phase exp(i s r)", abs(phase - np.exp(1j * s * r)),
            b["weil_cocycle_modulus"])
    for k in range(5):
        w1, w2 = random_word(1, rng, 2), random_word(1, rng, 2)
        sig, res = cocycle_check(w1, w2, G, tol=np.inf)
        rep.add(f"cocycle pair {k}: | |sigma| - 1 |  (arg sigma = {np.angle(sig):+.4f})",
                abs(abs(sig) - 1), b["weil_cocycle_modulus"])
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow([name for name, _ in prof])
    for row in zip(*[col for _, col in prof]):
        wr.writerow(row)
    (out / "weil_profiles.csv").parent.mkdir(parents=True, exist_ok=True)
    (out / "weil_profiles.csv").write_text(buf.getvalue())
    script = _write_plot_script(out, "weil_profiles.csv", "x", ["f"] + list(KINDS),
                                "|We(g) f| for one generator of each kind")
    rep.artifacts += ["weil_profiles.csv", script]
    return rep


def cmd_divergence_demo(cfg: dict, seed: int, out: Path, workers: int) -> Report:
    from .radon import divergence_demo

    b = budgets(cfg)
    rep = Report("divergence-demo", cfg, seed, out)
    N_list = tuple(cfg.get("divergence", {}).get("N_list", [4, 8, 16, 32, 64]))
    res = divergence_demo(N_list)
    vals = [v for _, v in res["radon"]]
    for (N, v) in res["radon"]:
        rep.add(f"R_comp gamma_N at N={N}", v, None)
    inc = [vals[k] - vals[k - 1] for k in range(1, len(vals))]
    # "value <= budget" form: the smallest increment must be positive
    rep.add("strict monotonicity: -min increment", -min(inc), -1e-12)
    rep.add("L2 norm: relative increment at the last box", res["l2_rel_increment"][-1],
            b["divergence_l2_increment"])
    rep.summary = {"growth_slope_vs_loglogN": res["growth_slope_vs_loglogN"],
                   "l2_sq_last": res["l2_sq"][-1][1]}
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["N", "radon_comp"])
    for N, v in res["radon"]:
        wr.writerow([N, repr(v)])
    (out / "divergence.csv").write_text(buf.getvalue())
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["log10_radius", "l2_norm_sq"])
    for lg, v in res["l2_sq"]:
        wr.writerow([repr(lg), repr(v)])
    (out / "l2_norm.csv").write_text(buf.getvalue())
    s1 = _write_plot_script(out, "divergence.csv", "N", ["radon_comp"], "R_comp gamma_N")
    s2 = _write_plot_script(out, "l2_norm.csv", "log10_radius", ["l2_norm_sq"],
                            "||gamma||^2 over growing balls")
    rep.artifacts += ["divergence.csv", "l2_norm.csv", s1, s2]
    return rep


def cmd_calibrate(cfg: dict, seed: int, out: Path, workers: int, method: str) -> Report:
    from .inversion import CalibrationError, calibrate

    b = budgets(cfg)
    method = {"torus": "torus-literal", "literal": "torus-literal"}.get(method, method)
    if method not in ("torus-literal", "riesz", "fourier"):
        raise ConfigError(f"unknown calibration method {method!r}")
    cc = cfg.get("calibrate", {})
    rep = Report("calibrate", cfg, seed, out)
    cal = calibrate(method, seed=seed, spread_tol=cc.get("spread_tol", b["calibration_spread"]),
                    resolution=cc.get("resolution"))
    rep.summary = {"constant": cal.to_dict()}
    rep.add(f"{method}: spread across oracles", cal.provenance["spread"],
            cc.get("spread_tol", b["calibration_spread"]))
    if method == "torus-literal":
        rep.add("torus-literal: |C / (-1/pi) - 1|", abs(cal.value * -np.pi - 1),
                b["calibration_torus_literal"])
    elif method == "fourier":
        rep.add("fourier: |C - 1|", abs(cal.value - 1), b["calibration_fourier"])
    else:
        rep.add(f"riesz: C = {cal.value:.6f} vs 1/(4 pi) = {1 / (4 * np.pi):.6f}",
                abs(cal.value * 4 * np.pi - 1), None)
    if not rep.passed:
        raise CalibrationError(f"{method} constant {cal.value:.6g} outside its budget")
    return rep


# ------------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lagrad", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"lagrad {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--seed", type=int, help="seed (overrides the config)")
    common.add_argument("--out", type=Path, default=Path("lagrad-out"), help="output directory")
    common.add_argument("--workers", type=int, help="worker processes (else config, else $LAGRAD_WORKERS)")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("forward", parents=[common], help="sample a Radon transform")
    p = sub.add_parser("invert", parents=[common], help="reconstruct from Radon data")
    p.add_argument("--method", choices=["fourier", "torus", "riesz"], default="fourier")
    p = sub.add_parser("check", parents=[common], help="residual suites")
    p.add_argument("--suite", choices=["determinantal", "equivariance", "weil", "kernel", "all"],
                   default="all")
    sub.add_parser("weil-demo", parents=[common], help="Weil generators on a sampled Gaussian")
    sub.add_parser("divergence-demo", parents=[common], help="the L2 counterexample")
    p = sub.add_parser("calibrate", parents=[common], help="calibrate an inversion constant")
    p.add_argument("--method", choices=["torus-literal", "torus", "riesz", "fourier"],
                   default="torus-literal")
    return ap


def run(argv=None) -> int:
    from .inversion import AliasingError, CalibrationError
    from .radon import QuadratureError

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        if not 0 <= seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if "input" in cfg and not Path(cfg["input"]).exists():
            raise ConfigError(f"input file not found: {cfg['input']}")
        workers = resolve_workers(args.workers, cfg)
        out = args.out
        cmd = args.command
        if cmd == "forward":
            rep = cmd_forward(cfg, seed, out, workers)
        elif cmd == "invert":
            rep = cmd_invert(cfg, seed, out, workers, args.method)
        elif cmd == "check":
            rep = cmd_check(cfg, seed, out, workers, args.suite)
        elif cmd == "weil-demo":
            rep = cmd_weil_demo(cfg, seed, out, workers)
        elif cmd == "divergence-demo":
            rep = cmd_divergence_demo(cfg, seed, out, workers)
        else:
            rep = cmd_calibrate(cfg, seed, out, workers, args.method)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except CalibrationError as e:
        print(f"calibration error: {e}", file=sys.stderr)
        return EXIT_CALIBRATION
    except (AliasingError, QuadratureError, NumericCheckError, np.linalg.LinAlgError) as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    rep.write()
    rep.echo()
    if not rep.passed:
        print(f"{rep.command}: budget exceeded", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main() -> None:
    sys.exit(run())
