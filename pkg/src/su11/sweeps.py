"""Parameter sweeps, figure-data jobs, config parsing and CSV emission.

Sweep configuration lives in flat ``key = value`` INI sections, one section
per sweep, so any tooling can parse and regenerate it.  CSV output is
deterministic: stable row ordering, 17-significant-digit floats, and failed
grid points carry an empty value cell plus a named error code instead of
NaNs.
"""

from __future__ import annotations

import configparser
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

from su11 import fock
from su11.errors import Su11Error
from su11.limits import limits
from su11.model import Params
from su11.qfi import qfi_ideal, qfi_lossy
from su11.sensitivity import sensitivity_ideal, sensitivity_lossy


def _qcrb_at(p: Params) -> float:
    # the lossy bound reduces to the ideal one at eta = 1, so a single rule
    # covers both figure families
    return qfi_lossy(p).qcrb


QUANTITIES: Dict[str, Callable[[Params], float]] = {
    "delta_phi_ideal": lambda p: sensitivity_ideal(p).delta_phi,
    "delta_phi_lossy": lambda p: sensitivity_lossy(p).delta_phi,
    "qfi_ideal": lambda p: qfi_ideal(p).f,
    "qfi_lossy": lambda p: qfi_lossy(p).f,
    "qcrb": _qcrb_at,
    "sql": lambda p: limits(p).sql,
    "hl": lambda p: limits(p).hl,
    "n_t": lambda p: limits(p).n_t,
    "oracle_delta_phi_a": lambda p: fock.numeric_sensitivity(p, "a"),
    "oracle_delta_phi_b": lambda p: fock.numeric_sensitivity(p, "b"),
    "oracle_qfi": fock.numeric_qfi_pure,
    "oracle_n_t": fock.numeric_internal_photon_number,
}

AXES = ("g", "beta", "phi", "T1", "T2", "eta", "alpha")
_FIXED_KEYS = ("g", "beta", "phi", "T1", "T2", "eta", "alpha", "nu")


@dataclass(frozen=True)
class SweepSpec:
    """One linear sweep of a named quantity along one parameter axis."""

    name: str
    quantity: str
    axis: str
    lo: float
    hi: float
    n_points: int
    m_list: Tuple[int, ...] = (0,)
    fixed: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if self.axis not in AXES:
            raise ValueError(f"unknown axis {self.axis!r}; choose from {AXES}")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")
        if not self.m_list:
            raise ValueError("m_list must not be empty")
        for key, _ in self.fixed:
            if key not in _FIXED_KEYS:
                raise ValueError(f"unknown parameter override {key!r}")
        # probe both axis endpoints through Params validation
        for x in (self.lo, self.hi):
            self.params_at(x, self.m_list[0])

    def params_at(self, x: float, m: int) -> Params:
        kw = dict(self.fixed)
        nu = int(kw.pop("nu", 1))
        kw[self.axis] = x
        return Params(m=m, nu=nu, **kw)

    def grid(self) -> List[float]:
        return [
            self.lo + (self.hi - self.lo) * i / (self.n_points - 1)
            for i in range(self.n_points)
        ]


# -- config files --------------------------------------------------------------


def parse_config(text: str) -> List[SweepSpec]:
    cp = configparser.ConfigParser()
    cp.optionxform = str  # parameter names are case-sensitive (T1, T2)
    cp.read_string(text)
    specs = []
    for section in cp.sections():
        opts = dict(cp.items(section))
        try:
            quantity = opts.pop("quantity")
            axis = opts.pop("axis")
            lo = float(opts.pop("lo"))
            hi = float(opts.pop("hi"))
            n_points = int(opts.pop("points"))
            m_list = tuple(int(tok) for tok in opts.pop("m", "0").split(","))
        except KeyError as err:
            raise ValueError(f"section [{section}] is missing key {err}") from None
        fixed = tuple(sorted((k, float(v)) for k, v in opts.items()))
        specs.append(
            SweepSpec(
                name=section,
                quantity=quantity,
                axis=axis,
                lo=lo,
                hi=hi,
                n_points=n_points,
                m_list=m_list,
                fixed=fixed,
            )
        )
    return specs


def serialize_config(specs: Sequence[SweepSpec]) -> str:
    out = io.StringIO()
    for spec in specs:
        out.write(f"[{spec.name}]\n")
        out.write(f"quantity = {spec.quantity}\n")
        out.write(f"axis = {spec.axis}\n")
        out.write(f"lo = {format_float(spec.lo)}\n")
        out.write(f"hi = {format_float(spec.hi)}\n")
        out.write(f"points = {spec.n_points}\n")
        out.write(f"m = {','.join(str(m) for m in spec.m_list)}\n")
        for key, value in spec.fixed:
            out.write(f"{key} = {format_float(value)}\n")
        out.write("\n")
    return out.getvalue()


# -- evaluation ----------------------------------------------------------------


def format_float(x: float) -> str:
    return format(x, ".17g")


def _error_code(err: Exception) -> str:
    name = type(err).__name__
    return name[:-5] if name.endswith("Error") else name


def _eval_task(task: Tuple[str, Params]) -> Tuple[str, str]:
    """Evaluate one (quantity, params) point; singular points become codes."""
    quantity, p = task
    try:
        return format_float(QUANTITIES[quantity](p)), ""
    except Su11Error as err:
        return "", _error_code(err)


def _worker_count(n_tasks: int) -> int:
    workers = min(os.cpu_count() or 1, n_tasks)
    cap = os.environ.get("SU11_THREADS")
    if cap:
        workers = min(workers, max(1, int(cap)))
    return max(workers, 1)


def evaluate_grid(tasks: List[Tuple[str, Params]]) -> List[Tuple[str, str]]:
    """Evaluate tasks, in parallel when allowed; results keep task order."""
    workers = _worker_count(len(tasks))
    if workers > 1:
        try:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(_eval_task, tasks, chunksize=4))
        except (OSError, PermissionError):
            pass  # restricted environments fall back to in-process evaluation
    return [_eval_task(t) for t in tasks]


Table = Tuple[List[str], List[List[str]]]


def run_sweep(spec: SweepSpec) -> Table:
    """One row per grid point per m: axis value, m, quantity value, error code."""
    tasks = []
    keys = []
    for m in spec.m_list:
        for x in spec.grid():
            tasks.append((spec.quantity, spec.params_at(x, m)))
            keys.append((x, m))
    results = evaluate_grid(tasks)
    header = [spec.axis, "m", spec.quantity, "error"]
    rows = [
        [format_float(x), str(m), value, code]
        for (x, m), (value, code) in zip(keys, results)
    ]
    return header, rows


def to_csv(table: Table) -> str:
    header, rows = table
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


# -- figure-data jobs -----------------------------------------------------------


@dataclass(frozen=True)
class FigureJob:
    figure_id: str
    output_path: str = ""

    def __post_init__(self):
        if self.figure_id not in FIGURES:
            raise ValueError(
                f"unknown figure {self.figure_id!r}; choose from {sorted(FIGURES)}"
            )


@dataclass(frozen=True)
class _FigureDef:
    description: str
    axis: str
    grid: Tuple[float, float, int]
    m_list: Tuple[int, ...]
    # each column: (label, quantity, mapping from axis value+m to Params)
    columns: Tuple[Tuple[str, str, Callable[[float, int], Params]], ...]
    builder: Callable[["_FigureDef"], "Table"] = None


def _lin(lo: float, hi: float, n: int) -> List[float]:
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


_BASE = dict(g=1.0, beta=1.0, phi=0.4)


def _build_fig2(fig: "_FigureDef") -> "Table":
    """Mode-a analytic plus mode-b oracle columns, sharing oracle pipelines.

    All m values reuse one pre-subtraction pipeline per phase point.  The
    cutoff required by the oracle grows monotonically with phi on (0, pi)
    (the effective squeeze of the composite interferometer increases toward
    pi), so once the ladder is exhausted every later phase point is marked
    unconverged without re-climbing.
    """
    lo, hi, n = fig.grid
    m_list = list(fig.m_list)
    rows_by_key = {}
    ladder_dead = False
    for x in _lin(lo, hi, n):
        p = Params(g=1.0, beta=1.0, phi=x)
        oracle = {}
        code_b = ""
        if ladder_dead:
            code_b = "Convergence"
        else:
            try:
                res = fock.numeric_moments_multi(p, m_list, mode="b")
                oracle = {m: format_float(res[m]["delta_phi"]) for m in m_list}
            except Su11Error as err:
                code_b = _error_code(err)
                ladder_dead = code_b == "Convergence"
        for m in m_list:
            value_a, code_a = _eval_task(("delta_phi_ideal", p.replace(m=m)))
            rows_by_key[(m, x)] = [
                format_float(x),
                str(m),
                value_a,
                code_a,
                oracle.get(m, ""),
                code_b,
            ]
    header = [fig.axis, "m", "delta_phi_a", "delta_phi_a_error",
              "delta_phi_b_oracle", "delta_phi_b_oracle_error"]
    rows = [rows_by_key[(m, x)] for m in m_list for x in _lin(lo, hi, n)]
    return header, rows


def _figures() -> Dict[str, _FigureDef]:
    figs: Dict[str, _FigureDef] = {}

    figs["fig2"] = _FigureDef(
        description="delta_phi vs phi at g=1, beta=1; mode a analytic, mode b oracle",
        axis="phi",
        grid=(0.05, 3.10, 32),
        m_list=(0, 1, 2, 3),
        columns=(
            ("delta_phi_a", "delta_phi_ideal", lambda x, m: Params(g=1.0, beta=1.0, phi=x, m=m)),
            ("delta_phi_b_oracle", "oracle_delta_phi_b", lambda x, m: Params(g=1.0, beta=1.0, phi=x, m=m)),
        ),
        builder=_build_fig2,
    )
    figs["fig3a"] = _FigureDef(
        description="delta_phi vs beta at g=1, phi=0.4",
        axis="beta",
        grid=(0.0, 3.0, 61),
        m_list=(0, 1, 2, 3),
        columns=(
            ("delta_phi", "delta_phi_ideal", lambda x, m: Params(g=1.0, beta=x, phi=0.4, m=m)),
        ),
    )
    figs["fig3b"] = _FigureDef(
        description="delta_phi vs g at beta=1, phi=0.4",
        axis="g",
        grid=(0.0, 2.0, 41),
        m_list=(0, 1, 2, 3),
        columns=(
            ("delta_phi", "delta_phi_ideal", lambda x, m: Params(g=x, beta=1.0, phi=0.4, m=m)),
        ),
    )
    figs["fig5"] = _FigureDef(
        description="lossy delta_phi vs T; internal (T1=T) and external (T2=T) loss",
        axis="T",
        grid=(0.3, 1.0, 71),
        m_list=(0, 1, 2, 3),
        columns=(
            ("delta_phi_internal", "delta_phi_lossy", lambda x, m: Params(T1=x, T2=1.0, m=m, **_BASE)),
            ("delta_phi_external", "delta_phi_lossy", lambda x, m: Params(T1=1.0, T2=x, m=m, **_BASE)),
        ),
    )
    figs["fig7a"] = _FigureDef(
        description="ideal QFI vs beta at g=1, phi=0.4",
        axis="beta",
        grid=(0.0, 3.0, 61),
        m_list=(0, 1, 2, 3),
        columns=(("qfi", "qfi_ideal", lambda x, m: Params(g=1.0, beta=x, phi=0.4, m=m)),),
    )
    figs["fig7b"] = _FigureDef(
        description="ideal QFI vs g at beta=1, phi=0.4",
        axis="g",
        grid=(0.0, 2.0, 41),
        m_list=(0, 1, 2, 3),
        columns=(("qfi", "qfi_ideal", lambda x, m: Params(g=x, beta=1.0, phi=0.4, m=m)),),
    )
    figs["fig8a"] = _FigureDef(
        description="delta_phi and QCRB vs beta (ideal, g=1, phi=0.4)",
        axis="beta",
        grid=(0.2, 3.0, 57),
        m_list=(0, 1, 2, 3),
        columns=(
            ("delta_phi", "delta_phi_ideal", lambda x, m: Params(g=1.0, beta=x, phi=0.4, m=m)),
            ("qcrb", "qcrb", lambda x, m: Params(g=1.0, beta=x, phi=0.4, m=m)),
        ),
    )
    figs["fig8b"] = _FigureDef(
        description="delta_phi and QCRB vs g (ideal, beta=1, phi=0.4)",
        axis="g",
        grid=(0.1, 2.0, 39),
        m_list=(0, 1, 2, 3),
        columns=(
            ("delta_phi", "delta_phi_ideal", lambda x, m: Params(g=x, beta=1.0, phi=0.4, m=m)),
            ("qcrb", "qcrb", lambda x, m: Params(g=x, beta=1.0, phi=0.4, m=m)),
        ),
    )
    figs["fig10"] = _FigureDef(
        description="lossy QFI vs transmissivity T (mapped to eta), g=1, beta=1, phi=0.4",
        axis="T",
        grid=(0.4, 1.0, 61),
        m_list=(0, 1, 2, 3),
        columns=(("qfi_lossy", "qfi_lossy", lambda x, m: Params(eta=x, m=m, **_BASE)),),
    )
    figs["fig11a"] = _FigureDef(
        description="QFI vs beta, ideal (T=1) and lossy (T=0.7), g=1, phi=0.4",
        axis="beta",
        grid=(0.0, 3.0, 61),
        m_list=(0, 1, 2, 3),
        columns=(
            ("qfi_ideal", "qfi_ideal", lambda x, m: Params(g=1.0, beta=x, phi=0.4, m=m)),
            ("qfi_lossy_T0.7", "qfi_lossy", lambda x, m: Params(g=1.0, beta=x, phi=0.4, eta=0.7, m=m)),
        ),
    )
    figs["fig11b"] = _FigureDef(
        description="QFI vs g, ideal (T=1) and lossy (T=0.7), beta=1, phi=0.4",
        axis="g",
        grid=(0.0, 2.0, 41),
        m_list=(0, 1, 2, 3),
        columns=(
            ("qfi_ideal", "qfi_ideal", lambda x, m: Params(g=x, beta=1.0, phi=0.4, m=m)),
            ("qfi_lossy_T0.7", "qfi_lossy", lambda x, m: Params(g=x, beta=1.0, phi=0.4, eta=0.7, m=m)),
        ),
    )
    figs["fig12"] = _FigureDef(
        description="internal photon number N_T vs T (T1=T), g=1, beta=1, phi=0.4",
        axis="T",
        grid=(0.4, 1.0, 61),
        m_list=(0, 1, 2, 3),
        columns=(("n_t", "n_t", lambda x, m: Params(T1=x, T2=1.0, m=m, **_BASE)),),
    )
    for m_fixed, fid in ((0, "fig13a"), (1, "fig13b"), (2, "fig13c"), (3, "fig13d")):
        figs[fid] = _FigureDef(
            description=f"delta_phi_lossy, SQL, HL, QCRB vs T at m={m_fixed}",
            axis="T",
            grid=(0.4, 1.0, 61),
            m_list=(m_fixed,),
            columns=(
                ("delta_phi_lossy", "delta_phi_lossy", lambda x, m: Params(T1=x, T2=1.0, m=m, **_BASE)),
                ("sql", "sql", lambda x, m: Params(T1=x, T2=1.0, m=m, **_BASE)),
                ("hl", "hl", lambda x, m: Params(T1=x, T2=1.0, m=m, **_BASE)),
                ("qcrb", "qcrb", lambda x, m: Params(eta=x, m=m, **_BASE)),
            ),
        )
    return figs


FIGURES = _figures()


def run_figure(job: FigureJob) -> Table:
    """Emit the sweep table underlying one published figure."""
    fig = FIGURES[job.figure_id]
    if fig.builder is not None:
        return fig.builder(fig)
    lo, hi, n = fig.grid
    xs = _lin(lo, hi, n)
    tasks = []
    for m in fig.m_list:
        for x in xs:
            for _, quantity, to_params in fig.columns:
                tasks.append((quantity, to_params(x, m)))
    results = evaluate_grid(tasks)
    header = [fig.axis, "m"]
    for label, _, _ in fig.columns:
        header.extend([label, f"{label}_error"])
    rows = []
    it = iter(results)
    for m in fig.m_list:
        for x in xs:
            row = [format_float(x), str(m)]
            for _ in fig.columns:
                value, code = next(it)
                row.extend([value, code])
            rows.append(row)
    return header, rows
