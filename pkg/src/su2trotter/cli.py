"""Command-line experiment driver.

Subcommands: classify, table1, count-gates, sweep-fidelity, sweep-chirality.
All numeric sweeps read a JSON config and write CSV files whose first line
embeds the resolved config, so a rerun with the same config is
byte-identical.  Exit codes: 0 success, 2 config error, 3 numerical check
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .encoder import canonical_encoder, extract_effective
from .models import (MODEL_NAMES, build_model, conventional_clustering,
                     format_polynomial, proposed_clustering, residual_count)
from .pauli import PauliSum
from .sim import (DensityMatrix, NoiseSpec, StateVector, apply_channel,
                  apply_circuit, channel_matrix, chirality_observable,
                  exact_evolve, expectation, fidelity, initial_state_kagome,
                  kagome_prep_circuit)
from .symmetry import classify
from .synth import count_gates, transpile
from .trotter import TrotterSchedule, block_sequence, build_circuit

TABLE1_MODELS = (
    "tfim-1d", "heis-1d", "j1j2-two-layer", "tfim-2d", "heis-2d",
    "kagome-heis", "kagome-chirality", "triangular-heis",
    "triangular-chirality",
)

# method -> (clustering builder, synthesis mode, product-formula order)
METHODS = {
    "conventional": (conventional_clustering, "conventional", 1),
    "triangle1": (proposed_clustering, "triangle", 1),
    "triangle2": (proposed_clustering, "triangle", 2),
}


class ConfigError(Exception):
    pass


class NumericalCheckError(Exception):
    pass


@dataclass
class ExperimentConfig:
    model: str = "kagome-ring-12"
    params: Dict = field(default_factory=dict)
    couplings: Dict[str, float] = field(
        default_factory=lambda: {"J": 1.0, "K": 0.1})
    methods: List[str] = field(
        default_factory=lambda: ["conventional", "triangle1", "triangle2"])
    t_final: float = math.pi
    n_steps: List[int] = field(default_factory=lambda: list(range(10, 101, 10)))
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    noise_on_preparation: bool = True
    seed: int = 0
    out: str = "."

    def validate(self) -> None:
        if self.model not in MODEL_NAMES:
            raise ConfigError("unknown model: " + self.model)
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError("unknown method: " + m)
        if not self.t_final > 0:
            raise ConfigError("t_final must be positive")
        if not self.n_steps:
            raise ConfigError("n_steps must be nonempty")
        if any(n < 1 for n in self.n_steps):
            raise ConfigError("n_steps entries must be positive")
        for v in self.couplings.values():
            if not math.isfinite(v):
                raise ConfigError("couplings must be finite")

    def as_json(self) -> str:
        d = {
            "model": self.model, "params": self.params,
            "couplings": self.couplings, "methods": self.methods,
            "t_final": self.t_final, "n_steps": self.n_steps,
            "noise": {"mode": self.noise.mode, "p1": self.noise.p1,
                      "p2": self.noise.p2, "pz": self.noise.pz},
            "noise_on_preparation": self.noise_on_preparation,
            "seed": self.seed,
        }
        return json.dumps(d, sort_keys=True)


def load_config(path: Optional[str], overrides: Dict) -> ExperimentConfig:
    data = {}
    if path:
        try:
            with open(path) as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError("cannot read config: %s" % e)
    cfg = ExperimentConfig()
    noise_data = dict(data.pop("noise", {}))
    for k, v in data.items():
        if not hasattr(cfg, k):
            raise ConfigError("unknown config key: " + k)
        setattr(cfg, k, v)
    for k in ("mode", "p1", "p2", "pz"):
        if k in overrides and overrides[k] is not None:
            noise_data[k] = overrides[k]
    if noise_data:
        try:
            cfg.noise = NoiseSpec(**noise_data)
        except (TypeError, ValueError) as e:
            raise ConfigError("bad noise spec: %s" % e)
    if overrides.get("out"):
        cfg.out = overrides["out"]
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# helpers


def _check(value: float, what: str) -> float:
    if not math.isfinite(value) or value < -1e-9 or value > 1.0 + 1e-9:
        raise NumericalCheckError("%s out of range: %r" % (what, value))
    return min(max(value, 0.0), 1.0)


# single precision keeps deep 12-qubit density sweeps inside the memory
# bandwidth budget; fidelities are then resolved to roughly 1e-6, far below
# any noise floor the sweeps probe
DENSITY_DTYPE = np.complex64


def _schedule(cfg: ExperimentConfig, method: str, n_steps: int,
              total_time: float):
    builder, mode, order = METHODS[method]
    model = build_model(cfg.model, cfg.params)
    clustering = builder(model)
    period = clustering.schedule_period
    if n_steps % period:
        n_steps += period - n_steps % period
    s = TrotterSchedule(clustering, order, n_steps, total_time,
                        couplings=cfg.couplings)
    return s, mode, model


def _trotter_circuit(cfg: ExperimentConfig, method: str, n_steps: int,
                     total_time: float):
    s, mode, model = _schedule(cfg, method, n_steps, total_time)
    return transpile(build_circuit(s, mode)), model


def _prep_density(cfg: ExperimentConfig, n_sites: int) -> DensityMatrix:
    prep = transpile(kagome_prep_circuit(n_sites))
    if cfg.noise_on_preparation:
        rho = DensityMatrix.from_statevector(
            StateVector.computational(n_sites), dtype=DENSITY_DTYPE)
        return apply_circuit(rho, prep, cfg.noise)
    return DensityMatrix.from_statevector(
        apply_circuit(StateVector.computational(n_sites), prep),
        dtype=DENSITY_DTYPE)


def _noisy_evolved(cfg: ExperimentConfig, method: str, n_steps: int,
                   total_time: float, prep_rho: DensityMatrix
                   ) -> DensityMatrix:
    """Noisy trotter evolution, one superoperator per block.

    Noise attaches to the gates of each block-locally transpiled circuit,
    so each (cluster, duration) pair costs one channel_matrix build and
    every repetition a single contraction.
    """
    s, mode, _ = _schedule(cfg, method, n_steps, total_time)
    rho = DensityMatrix(prep_rho.n_qubits, prep_rho.entries.copy(),
                        dtype=DENSITY_DTYPE)
    chans: Dict[int, "np.ndarray"] = {}
    for sites, bc in block_sequence(s, mode):
        key = id(bc)
        if key not in chans:
            chans[key] = channel_matrix(transpile(bc), cfg.noise)
        rho = apply_channel(rho, chans[key], sites)
    return rho


def _evolved_state(cfg: ExperimentConfig, method: str, n_steps: int,
                   total_time: float, prep_rho: Optional[DensityMatrix]):
    """Run prep + trotter on the configured backend; returns the state."""
    if cfg.noise.is_trivial():
        model = build_model(cfg.model, cfg.params)
        prep = transpile(kagome_prep_circuit(model.n_sites))
        circ, _ = _trotter_circuit(cfg, method, n_steps, total_time)
        st = apply_circuit(StateVector.computational(model.n_sites), prep)
        return apply_circuit(st, circ)
    return _noisy_evolved(cfg, method, n_steps, total_time, prep_rho)


def _write(path: str, cfg_line: str, header: str, rows: List[str]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        f.write("# config: %s\n" % cfg_line)
        f.write(header + "\n")
        for r in rows:
            f.write(r + "\n")


def _emit_plot(path: str, csv_name: str, xlabel: str, ylabel: str,
               using: str, title_col: int) -> None:
    script = "\n".join([
        "set datafile separator ','",
        "set logscale xy",
        "set xlabel '%s'" % xlabel,
        "set ylabel '%s'" % ylabel,
        "plot '%s' using %s with linespoints" % (csv_name, using),
        "",
    ])
    with open(path, "w") as f:
        f.write(script)


# ---------------------------------------------------------------------------
# subcommands


def run_classify(path: str, dump_encoder: bool, out=sys.stdout) -> None:
    try:
        with open(path) as f:
            h = PauliSum.from_text(f.read())
    except OSError as e:
        raise ConfigError(str(e))
    if h.n_sites != 3:
        raise ConfigError("classify expects a three-site Hamiltonian")
    classes = sorted(classify(h, (0, 1, 2)))
    out.write("classes: {%s}\n" % ",".join(str(c) for c in classes))
    if len(classes) == 1:
        enc = canonical_encoder(classes[0])
        g_eff, h_eff = extract_effective(h, enc, 0)
        out.write("symmetry_wire_term: %s\n" % g_eff.to_text().replace(
            "\n", "; "))
        out.write("effective: %s\n" % h_eff.to_text().replace("\n", "; "))
        if dump_encoder:
            out.write("encoder:\n%s\n" % enc.to_text())


def run_table1(out=sys.stdout) -> List[str]:
    rows = []
    out.write("model,clusters_conventional,clusters_proposed,"
              "residual_conventional,residual_proposed\n")
    for name in TABLE1_MODELS:
        model = build_model(name)
        conv = conventional_clustering(model)
        prop = proposed_clustering(model)
        row = "%s,%d,%d,%s,%s" % (
            name, conv.cluster_count(), prop.cluster_count(),
            format_polynomial(residual_count(conv)),
            format_polynomial(residual_count(prop)))
        rows.append(row)
        out.write(row + "\n")
    return rows


def run_count_gates(cfg: ExperimentConfig, out=sys.stdout) -> Dict[str, int]:
    out.write("method,n_steps,cnot_per_step,rz_nonclifford_per_step,"
              "rz_clifford_per_step,sqrtx_per_step\n")
    per_step_cnot = {}
    for method in cfg.methods:
        reps = [1] if method != "triangle2" else [1, 10]
        for n in reps:
            circ, _ = _trotter_circuit(cfg, method, n, cfg.t_final * n)
            g = count_gates(circ)
            out.write("%s,%d,%.6g,%.6g,%.6g,%.6g\n" % (
                method, n, g.cnot / n, g.rz_nonclifford / n,
                g.rz_clifford / n, g.sqrtx / n))
            per_step_cnot[method] = g.cnot / n
    return per_step_cnot


def run_fidelity_sweep(cfg: ExperimentConfig, out_path: str) -> List[str]:
    if cfg.model != "kagome-ring-12":
        raise ConfigError("fidelity sweeps are sized for kagome-ring-12")
    model = build_model(cfg.model, cfg.params)
    ideal_init = initial_state_kagome(model.n_sites)
    ref = exact_evolve(model.hamiltonian(), cfg.t_final, ideal_init,
                       cfg.couplings)
    prep_rho = None
    if not cfg.noise.is_trivial():
        prep_rho = _prep_density(cfg, model.n_sites)
    rows = []
    for method in cfg.methods:
        for n in cfg.n_steps:
            circ, _ = _trotter_circuit(cfg, method, n, cfg.t_final)
            state = _evolved_state(cfg, method, n, cfg.t_final, prep_rho)
            infid = _check(1.0 - fidelity(state, ref),
                           "infidelity(%s,n=%d)" % (method, n))
            g = count_gates(circ)
            rows.append("%s,%d,%d,%d,%.12e" % (
                method, n, g.cnot, g.rz_nonclifford, infid))
    _write(out_path, cfg.as_json(),
           "method,n_steps,cnot,rz_nc,infidelity", rows)
    _emit_plot(os.path.splitext(out_path)[0] + ".gp",
               os.path.basename(out_path), "CNOT count", "infidelity",
               "3:5", 1)
    return rows


def run_chirality_sweep(cfg: ExperimentConfig, out_path: str) -> List[str]:
    if cfg.model != "kagome-ring-12":
        raise ConfigError("chirality sweeps need the kagome-ring-12 model")
    model = build_model(cfg.model, cfg.params)
    obs = chirality_observable(model)
    ideal_init = initial_state_kagome(model.n_sites)
    t_grid = [k * math.pi / 20.0 for k in range(1, 21)]
    exact_vals = {}
    for t in t_grid:
        ev = exact_evolve(model.hamiltonian(), t, ideal_init, cfg.couplings)
        exact_vals[t] = expectation(ev, obs)
    prep_rho = None
    if not cfg.noise.is_trivial():
        prep_rho = _prep_density(cfg, model.n_sites)
    rows = []
    for method in cfg.methods:
        for n in cfg.n_steps:
            for t in t_grid:
                state = _evolved_state(cfg, method, n, t, prep_rho)
                est = expectation(state, obs)
                if not math.isfinite(est):
                    raise NumericalCheckError("chirality estimate diverged")
                bias = est - exact_vals[t]
                rows.append("%s,%d,%.12f,%.12e,%.12e,%.12e" % (
                    method, n, t, est, exact_vals[t], bias))
    _write(out_path, cfg.as_json(),
           "method,n_steps,t,chi_est,chi_exact,bias", rows)
    _emit_plot(os.path.splitext(out_path)[0] + ".gp",
               os.path.basename(out_path), "t", "chirality bias",
               "3:6", 1)
    return rows


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="su2trotter")
    sub = p.add_subparsers(dest="command", required=True)
    cla = sub.add_parser("classify", help="classify a three-site Hamiltonian")
    cla.add_argument("hamiltonian", help="PauliSum text file")
    cla.add_argument("--dump-encoder", action="store_true")
    sub.add_parser("table1", help="cluster counts and residual polynomials")
    for name in ("count-gates", "sweep-fidelity", "sweep-chirality"):
        s = sub.add_parser(name)
        s.add_argument("--config", default=None)
        s.add_argument("--out", default=None)
        s.add_argument("--noise", dest="mode",
                       choices=("none", "depolarizing", "dephasing"),
                       default=None)
        s.add_argument("--p1", type=float, default=None)
        s.add_argument("--p2", type=float, default=None)
        s.add_argument("--pz", type=float, default=None)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "classify":
            run_classify(args.hamiltonian, args.dump_encoder)
            return 0
        if args.command == "table1":
            run_table1()
            return 0
        overrides = {k: getattr(args, k, None)
                     for k in ("mode", "p1", "p2", "pz", "out")}
        cfg = load_config(args.config, overrides)
        out_dir = cfg.out or "."
        if args.command == "count-gates":
            run_count_gates(cfg)
        elif args.command == "sweep-fidelity":
            run_fidelity_sweep(cfg, os.path.join(out_dir, "fidelity.csv"))
        elif args.command == "sweep-chirality":
            run_chirality_sweep(cfg, os.path.join(out_dir, "chirality.csv"))
        return 0
    except ConfigError as e:
        print("config error: %s" % e, file=sys.stderr)
        return 2
    except NumericalCheckError as e:
        print("numerical check failed: %s" % e, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
