"""Scenario runner: build, verify, solve, compile and simulate from a JSON file.

Exit codes: 0 every asserted check passed, 1 a check failed, 2 the scenario
could not be parsed (or names a missing fixture), 3 a dense object would
exceed the dimension cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import dims as dims_mod
from .compiler import DEFAULT_CAP, CapExceeded, compile_circuit, dictionary_residual, layer_unitarity
from .dynamics import SiteOperator, correlation_grid, lightcone_correlation, site_matrix
from .fills import FILLS, fill_diagram, make_fill, vertex_q
from .fixtures import FIXTURE_TOL, fixture_checks, read_matrix, shipped_checks, shipped_dir
from .lattice import BUILTIN_SHADINGS, DUAL_UNITARY, IllegalDiagram, build_diagram, classify_vertex
from .states import (
    BRICKWORK,
    CLOCKWORK,
    HYBRID,
    GrowthProfile,
    NotSolvable,
    brickwork_solvable,
    build_state,
    clockwork_solvable,
    growth_profile,
    hybrid_solvable,
    random_row,
)
from .structures import check_biunitary, du_vertex, expected_lambda, fourier_matrix
from .tensor import VERIFY_TOL, haar_unitary

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_CAP = 0, 1, 2, 3
SCHEMA = 1
TASKS = ("dims", "verify", "compile", "correlations", "entanglement", "solvable", "appendixA-regression")

OPERATORS = {
    "x": "shift (Pauli X at q=2)",
    "y": "i * shift * clock (Pauli Y at q=2)",
    "z": "clock (Pauli Z at q=2)",
    "clock": "alias of z",
    "shift": "alias of x",
}
_ALIASES = {"clock": "z", "shift": "x"}

SOLVABLE_SPECS = {
    "random-row(seed, chi)": "seeded solvable tensor per cell, variant chosen by the bottom-row shading",
    "brickwork(W, chi)": "one brickwork tensor from a unitary W ('fourier' or 'random')",
    "clockwork(family)": "one clockwork tensor from q unitaries ('fourier', 'identity' or 'random')",
    "hybrid(family)": "one hybrid tensor from q unitaries",
}


class ScenarioError(ValueError):
    """The scenario file is malformed or references something missing."""


@dataclass
class Scenario:
    name: str
    diagram: dict
    tasks: dict
    pins: list = field(default_factory=list)
    q: int = 2
    assignment: dict = field(default_factory=dict)
    expect: dict = field(default_factory=dict)
    description: str = ""
    base: Path = Path(".")


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise ScenarioError(f"no such scenario: {path}") from e
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: invalid JSON ({e})") from e
    return parse_scenario(raw, path.parent)


def parse_scenario(raw: dict, base: Path = Path(".")) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object")
    if raw.get("schema") != SCHEMA:
        raise ScenarioError(f"unsupported schema {raw.get('schema')!r} (expected {SCHEMA})")
    for key in ("name", "diagram", "tasks"):
        if key not in raw:
            raise ScenarioError(f"missing field {key!r}")
    tasks = raw["tasks"]
    if not isinstance(tasks, dict) or not tasks:
        raise ScenarioError("tasks must be a non-empty object")
    unknown = [t for t in tasks if t not in TASKS]
    if unknown:
        raise ScenarioError(f"unknown tasks {unknown}; known: {list(TASKS)}")
    diag = raw["diagram"]
    if not isinstance(diag, dict) or not {"L", "T"} <= set(diag):
        raise ScenarioError("diagram needs L and T")
    if "builtin" not in diag and "faces" not in diag:
        raise ScenarioError("diagram needs a builtin name or explicit faces")
    if "builtin" in diag and diag["builtin"] not in BUILTIN_SHADINGS:
        raise ScenarioError(f"unknown builtin diagram {diag['builtin']!r}")
    sc = Scenario(
        name=str(raw["name"]),
        diagram=diag,
        tasks=tasks,
        pins=list(raw.get("pins", [])),
        q=int(raw.get("q", 2)),
        assignment=dict(raw.get("assignment", {"fill": "fourier-hadamard"})),
        expect=dict(raw.get("expect", {})),
        description=str(raw.get("description", "")),
        base=Path(base),
    )
    fx = sc.assignment.get("fixture")
    if fx is not None:
        _fixture_path(sc, fx)
    return sc


def _fixture_path(sc: Scenario, name: str) -> Path:
    local = sc.base / name
    if local.is_file():
        return local
    shipped = shipped_dir() / name
    if shipped.is_file():
        return Path(str(shipped))
    raise ScenarioError(f"fixture {name!r} not found next to the scenario or among shipped fixtures")


# report -----------------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    value: str
    asserted: bool = True


class Report:
    def __init__(self, name: str):
        self.name = name
        self.info: list[tuple[str, str]] = []
        self.checks: list[Check] = []

    def note(self, key: str, value) -> None:
        self.info.append((key, str(value)))

    def check(self, name: str, passed: bool, value, asserted: bool = True) -> None:
        self.checks.append(Check(name, bool(passed), str(value), asserted))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.asserted)

    def text(self) -> str:
        lines = [f"scenario: {self.name}"]
        lines += [f"{k}: {v}" for k, v in self.info]
        for c in self.checks:
            tag = ("PASS" if c.passed else "FAIL") if c.asserted else ("ok" if c.passed else "deviates") + " (reported)"
            lines.append(f"check {c.name}: {tag} [{c.value}]")
        lines.append(f"status: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines) + "\n"


# building blocks ----------------------------------------------------------------


def scenario_diagram(sc: Scenario):
    spec = sc.diagram
    L, T, periodic = int(spec["L"]), int(spec["T"]), bool(spec.get("periodic", True))
    if "builtin" in spec:
        params = dict(spec.get("params", {}))
        if "apex" in params:
            params["apex"] = tuple(params["apex"])
        return build_diagram(L, T, spec["builtin"], periodic, **params)
    return build_diagram(L, T, [tuple(f) for f in spec["faces"]], periodic)


def scenario_pins(sc: Scenario, d) -> dict:
    pins = {}
    for p in sc.pins:
        if "apex" in p:
            v = tuple(p["apex"])
            if v not in set(d.vertices()):
                raise ScenarioError(f"apex {v} is not a vertex of the diagram")
            pins.update(dims_mod.apex_pins(d, v, int(p.get("dim", sc.q))))
        else:
            try:
                pins[dims_mod.pin_key(d, p)] = int(p["dim"])
            except (KeyError, ValueError) as e:
                raise ScenarioError(f"bad pin {p}: {e}") from e
    return pins


def scenario_fill(sc: Scenario, seed: int):
    a = sc.assignment
    if "fixture" in a:
        U = read_matrix(_fixture_path(sc, a["fixture"]))
        q = int(round(np.sqrt(U.shape[0])))
        base = make_fill("fourier-hadamard")

        def fixture_fill(kind, dim, v, rng):
            if kind.name == DUAL_UNITARY and dim == q:
                return du_vertex(U)
            return base(kind, dim, v, rng)

        return fixture_fill
    try:
        fill = make_fill(a.get("fill", "fourier-hadamard"), seed)
        per_kind = {k: make_fill(v, seed) for k, v in a.get("kinds", {}).items()}
    except ValueError as e:
        raise ScenarioError(str(e)) from e
    if not per_kind:
        return fill
    return lambda kind, dim, v, rng: per_kind.get(kind.name, fill)(kind, dim, v, rng)


def _family(spec, q: int, rng) -> np.ndarray:
    if spec == "identity":
        return np.stack([np.eye(q, dtype=np.complex128)] * q)
    if spec == "fourier":
        return np.stack([fourier_matrix(q) / np.sqrt(q)] * q)
    if spec == "random":
        return np.stack([haar_unitary(q, rng) for _ in range(q)])
    raise ScenarioError(f"unknown family {spec!r}")


def solvable_tensors(spec: dict, d, q: int, seed: int):
    kind = spec.get("kind", "random-row")
    rng = np.random.default_rng(int(spec.get("seed", seed)))
    if kind == "random-row":
        chi = spec.get("chi")
        return random_row(d, rng, q, None if chi is None else int(chi))
    if kind == BRICKWORK:
        chi = int(spec.get("chi", 1))
        W = fourier_matrix(q) / np.sqrt(q) if spec.get("W", "random") == "fourier" and chi == 1 else haar_unitary(q * chi, rng)
        return brickwork_solvable(W, q, chi)
    if kind == CLOCKWORK:
        return clockwork_solvable(_family(spec.get("family", "random"), q, rng))
    if kind == HYBRID:
        return hybrid_solvable(_family(spec.get("family", "random"), q, rng))
    raise ScenarioError(f"unknown solvable spec {kind!r}")


# tasks ---------------------------------------------------------------------------


class _Run:
    def __init__(self, sc: Scenario, out: Path | None, tol: float, seed: int, cap: int):
        self.sc, self.out, self.tol, self.seed, self.cap = sc, out, tol, seed, cap
        self.report = Report(sc.name)
        self.files: dict[str, str] = {}
        self.d = None
        self.solution = None
        self.assignment = None
        self.circuit = None

    # prerequisites
    def diagram(self):
        if self.d is None:
            try:
                self.d = scenario_diagram(self.sc)
            except (IllegalDiagram, KeyError, TypeError) as e:
                raise ScenarioError(f"diagram: {e}") from e
            self.report.note("diagram", f"{self.d.name} L={self.d.L} T={self.d.T} periodic={self.d.periodic}")
        return self.d

    def dims(self):
        if self.solution is None:
            d = self.diagram()
            self.solution = dims_mod.solve_dimensions(d, scenario_pins(self.sc, d))
        return self.solution

    def fill(self):
        if self.assignment is None:
            sol = self.dims()
            if sol.status != dims_mod.SOLVED:
                raise ScenarioError(f"cannot fill a diagram whose dimension solution is {sol.status}")
            self.assignment = fill_diagram(self.diagram(), scenario_fill(self.sc, self.seed), self.seed, sol, self.sc.q)
        return self.assignment

    def compiled(self):
        if self.circuit is None:
            self.circuit = compile_circuit(self.fill(), verify=False)
        return self.circuit

    # tasks
    def task_dims(self, opts):
        sol = self.dims()
        self.report.note("dims status", sol.status)
        for g, v in sol.generators.items():
            self.report.note(f"dims generator {g}", "free" if v is None else v)
        for c in sol.conflicts:
            self.report.note("dims conflict", c)
        if sol.status == dims_mod.TRIVIALIZED:
            self.report.note("dims witness", "every wire and region forced to dimension 1 (m = n = 1)")
        d = self.diagram()
        shaded = sorted({sol.dim(d.region(f)) for f in d.faces() if d.is_shaded(f)} - {None}) if sol.status != dims_mod.CONTRADICTION else []
        self.report.note("dims shaded faces", shaded)

    def task_verify(self, opts):
        a = self.fill()
        kinds, lams, worst = {}, {}, 0.0
        bad, lam_bad = [], []
        for v in self.diagram().vertices():
            b = a[v]
            rep = check_biunitary(b, self.tol)
            kinds[str(b.kind)] = kinds.get(str(b.kind), 0) + 1
            lams.setdefault(str(b.kind), set()).add(f"{rep.lam:.6g}")
            worst = max(worst, rep.max_residual)
            q = vertex_q(self.diagram(), v, a.solution)
            want = None if isinstance(q, tuple) else expected_lambda(b.kind, q)
            if not rep.passed:
                bad.append(v)
            elif want is not None and abs(rep.lam - want) > self.tol * max(1.0, want):
                lam_bad.append(v)
        self.report.note("vertex kinds", ", ".join(f"{k} x{n}" for k, n in sorted(kinds.items())))
        self.report.note("lambda", "; ".join(f"{k}: {', '.join(sorted(s))}" for k, s in sorted(lams.items())))
        self.report.check("biunitarity", not bad, f"max residual {worst:.2e}; failing {bad[:4]}")
        self.report.check("lambda-pinned", not lam_bad, f"mismatched {lam_bad[:4]}")

    def task_compile(self, opts):
        c = self.compiled()
        gates = 0.0
        for layer in c.layers:
            for g in layer:
                G = g.matrix
                I = np.eye(G.shape[3])
                gates = max(gates, np.abs(np.einsum("weoi,weoj->weij", G.conj(), G) - I).max())
        self.report.check("compiled-gate-unitarity", gates < self.tol, f"{gates:.2e}")
        layers = max(layer_unitarity(c, t, self.cap) for t in range(c.T))
        self.report.check("compiled-layer-unitarity", layers < self.tol, f"{layers:.2e}")
        res = dictionary_residual(self.fill(), c, self.cap)
        self.report.check("diagram-equals-circuit", res < self.tol, f"{res:.2e}")

    def task_correlations(self, opts):
        a = self.fill()
        pairs = opts.get("pairs") or [[opts.get("rho", "z"), opts.get("sigma", "z")]]
        T = opts.get("T")
        for i, (rho, sigma) in enumerate(pairs):
            rho, sigma = _ALIASES.get(rho, rho), _ALIASES.get(sigma, sigma)
            if rho not in OPERATORS or sigma not in OPERATORS:
                raise ScenarioError(f"unknown operator in pair {rho!r}, {sigma!r}")
            g = correlation_grid(a, rho, sigma, T, opts.get("ref"), self.cap, meta={"rho": rho, "sigma": sigma})
            tag = f"{rho}{sigma}"
            off = g.off_cone_max()
            self.report.check(f"off-cone-zero[{tag}]", off < self.tol, f"max |c| off the edge {off:.2e}")
            if opts.get("edge_check", True):
                ref = g.meta["ref"]
                worst = 0.0
                for x, t, v, s in g.edge_entries():
                    if not g.asserted(t):
                        continue
                    cd = self.compiled().cut_dims
                    r = SiteOperator(ref, site_matrix(rho, cd[t][ref]))
                    sg = SiteOperator(s, site_matrix(sigma, cd[0][s]))
                    worst = max(worst, abs(lightcone_correlation(a, r, sg, t) - v))
                self.report.check(f"edge-method[{tag}]", worst < self.tol, f"max |diamond - brute| {worst:.2e}")
            self.files["correlations.csv" if i == 0 else f"correlations-{rho}-{sigma}.csv"] = g.to_csv()

    def task_entanglement(self, opts):
        d = self.diagram()
        c = self.compiled()
        spec = dict(opts.get("state", {}))
        try:
            tensors = solvable_tensors(spec, d, self.sc.q, self.seed)
        except NotSolvable as e:
            self.report.check("solvable-state", False, str(e))
            return
        state = build_state(d, tensors, spec.get("closure", "open"), spec.get("seam"), self.cap)
        self.report.note("state", f"{spec.get('kind', 'random-row')} closure={spec.get('closure', 'open')} dim={state.psi.shape}")
        Tmax = int(opts.get("Tmax", d.T))
        rows = []
        therm, renyi, growth = 0.0, 0.0, 0.0
        for ell in opts.get("ell", [2]):
            prof = growth_profile(state, c, int(ell), Tmax, opts.get("start"), self.tol)
            for r in prof.rows:
                rows.append(r)
                if not prof.asserted(r):
                    continue
                growth = max(growth, abs(r.S - prof.expected(r)))
                if 2 * r.t >= r.ell:
                    therm = max(therm, r.deviation)
                    lq = np.log(r.qA)
                    renyi = max(renyi, abs(r.S - lq), *(abs(v - lq) for v in r.renyi.values()))
        if opts.get("thermalization", True):
            self.report.check("thermalization", therm < self.tol, f"max |rho_A - I/q_A| {therm:.2e}")
            self.report.check("renyi-flatness", renyi < self.tol, f"max |S_n - ln q_A| {renyi:.2e}")
        gtol = float(opts.get("growth_tol", 1e-8))
        self.report.check("growth-min(2t,ell)", growth < gtol, f"max |S - min(2t, ell) ln q| {growth:.2e}", asserted=bool(opts.get("assert_growth", False)))
        self.files["entropies.csv"] = GrowthProfile(rows=rows).to_csv()

    def task_solvable(self, opts):
        spec = dict(opts)
        want = spec.pop("expect_failure", None)
        try:
            n = solvable_tensors(spec, self.diagram(), self.sc.q, self.seed)
            outcome = "accepted"
        except NotSolvable as e:
            outcome = f"rejected at {e.report.failed}"
        except ValueError as e:
            outcome = f"rejected ({e})"
        self.report.note("solvable", outcome)
        if want is not None:
            self.report.check("solvable-expectation", outcome == f"rejected at {want}", f"{outcome}; expected rejection at {want}")
        else:
            self.report.check("solvable", outcome == "accepted", outcome)

    def task_appendixA_regression(self, opts):
        for name, dev in fixture_checks() + shipped_checks():
            self.report.check(f"fixture {name}", dev < FIXTURE_TOL, f"max deviation {dev:.2e}")

    # expectations
    def expectations(self):
        e = self.sc.expect
        if "dims_status" in e:
            st = self.dims().status
            self.report.check("expect dims status", st == e["dims_status"], f"{st}; expected {e['dims_status']}")
        if "shaded_face_dim" in e:
            d, sol = self.diagram(), self.dims()
            got = sorted({sol.dim(d.region(f)) for f in d.faces() if d.is_shaded(f)})
            self.report.check("expect shaded face dims", got == [int(e["shaded_face_dim"])], f"{got}; expected [{e['shaded_face_dim']}]")
        if "kinds" in e:
            d = self.diagram()
            got = sorted({classify_vertex(d, v).name for v in d.vertices()})
            self.report.check("expect vertex kinds", got == sorted(e["kinds"]), f"{got}; expected {sorted(e['kinds'])}")

    def run(self) -> int:
        for task in TASKS:
            if task in self.sc.tasks:
                getattr(self, "task_" + task.replace("-", "_"))(dict(self.sc.tasks[task] or {}))
        self.expectations()
        self.files["report"] = self.report.text()
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)
            for name, text in self.files.items():
                (self.out / name).write_text(text)
        return EXIT_OK if self.report.ok else EXIT_FAIL


def run_scenario(path_or_scenario, out=None, tol: float = VERIFY_TOL, seed: int | None = None, cap: int = DEFAULT_CAP):
    """Run a scenario; returns ``(exit status, report text, files)``."""
    try:
        sc = path_or_scenario if isinstance(path_or_scenario, Scenario) else load_scenario(path_or_scenario)
        seed = int(sc.assignment.get("seed", 0)) if seed is None else seed
        r = _Run(sc, None if out is None else Path(out), tol, seed, cap)
        status = r.run()
        return status, r.files["report"], r.files
    except ScenarioError as e:
        return EXIT_PARSE, f"error: {e}\n", {}
    except CapExceeded as e:
        return EXIT_CAP, f"resource cap: {e}\n", {}


def shipped_scenarios() -> list[str]:
    root = resources.files("biunitary_circuits") / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def shipped_scenario(name: str) -> Path:
    return Path(str(resources.files("biunitary_circuits") / "scenarios" / name))


def list_builtins() -> str:
    lines = ["diagrams:"]
    lines += [f"  {k}: {v}" for k, v in BUILTIN_SHADINGS.items()]
    lines.append("fills:")
    lines += [f"  {k}: {v}" for k, v in FILLS.items()]
    lines.append("operators:")
    lines += [f"  {k}: {v}" for k, v in OPERATORS.items()]
    lines.append("solvable specs:")
    lines += [f"  {k}: {v}" for k, v in SOLVABLE_SPECS.items()]
    lines.append("scenarios:")
    lines += [f"  {n}" for n in shipped_scenarios()]
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="biunitary", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run a scenario file (or the name of a shipped one)")
    r.add_argument("scenario")
    r.add_argument("--out", default=None, help="output directory (default: ./out/<name>)")
    r.add_argument("--tol", type=float, default=VERIFY_TOL)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--cap", type=int, default=DEFAULT_CAP)
    sub.add_parser("list", help="catalog of builtin diagrams, fills, operators and scenarios")
    f = sub.add_parser("fixtures", help="fixture maintenance")
    f.add_argument("action", choices=["check"])
    args = p.parse_args(argv)
    if args.cmd == "list":
        sys.stdout.write(list_builtins())
        return EXIT_OK
    if args.cmd == "fixtures":
        ok = True
        for name, dev in fixture_checks() + shipped_checks():
            good = dev < FIXTURE_TOL
            ok &= good
            print(f"{'PASS' if good else 'FAIL'} {name}: max deviation {dev:.2e}")
        return EXIT_OK if ok else EXIT_FAIL
    path = Path(args.scenario)
    if not path.exists() and args.scenario in shipped_scenarios():
        path = shipped_scenario(args.scenario)
    name = path.stem
    out = Path(args.out) if args.out else Path("out") / name
    status, text, _ = run_scenario(path, out, args.tol, args.seed, args.cap)
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
