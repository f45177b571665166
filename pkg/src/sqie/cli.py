"""Command-line harness: ``sqie run``, ``sqie sweep-security``, ``sqie verify``.

Exit codes: 0 ok, 1 check failed, 2 bad input file, 3 too many qubits,
4 no resource construction for the requested ``l``.

Amplitude files hold a ``qubits: k`` header, then one ``re im`` pair per line
in big-endian basis order.  Transcripts are JSON with complex numbers written
as ``[re, im]``.  Without ``--output``, files go to ``$SQIE_OUTPUT_DIR`` when
set, otherwise to stdout.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import pauli
from .pauli import PauliString, gbs_basis
from .protocol import (
    ClassicalMessage,
    ExchangeTranscript,
    enumerate_branches,
    run_exchange,
    stream,
    verify_rewrite_identity,
)
from .qstate import MAX_QUBITS, QuantumState, make_state, random_state
from .resource import Permutation, ResourceSpec
from .security import SecurityReport, security_sweep

OUTPUT_DIR_ENV = "SQIE_OUTPUT_DIR"

EXIT_OK, EXIT_FAILED, EXIT_BAD_INPUT, EXIT_TOO_BIG, EXIT_NO_VARIANT = 0, 1, 2, 3, 4


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- file formats


def read_amplitudes(path: str | Path) -> QuantumState:
    try:
        lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not lines or not lines[0].startswith("qubits:"):
        raise InputError(f"{path}: missing 'qubits: k' header")
    try:
        k = int(lines[0].split(":", 1)[1])
        amps = []
        for ln in lines[1:]:
            re_, im_ = ln.split()
            amps.append(complex(float(re_), float(im_)))
    except ValueError as exc:
        raise InputError(f"{path}: malformed line ({exc})") from exc
    if len(amps) != 2**k:
        raise InputError(f"{path}: expected {2**k} amplitudes, found {len(amps)}")
    try:
        return make_state(amps)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def write_amplitudes(state: QuantumState, path: str | Path) -> None:
    lines = [f"qubits: {state.num_qubits}"]
    lines += [f"{a.real:.17e} {a.imag:.17e}" for a in state.amplitudes]
    Path(path).write_text("\n".join(lines) + "\n")


def _cplx(values) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in values]


def transcript_to_dict(t: ExchangeTranscript) -> dict:
    return {
        "m": t.m,
        "n": t.n,
        "l": t.l,
        "input_xi": _cplx(t.input_xi),
        "input_eta": _cplx(t.input_eta),
        "r": t.r,
        "s": t.s,
        "charlie_outcome": t.charlie_outcome,
        "channel": list(t.channel),
        "messages": [{"kind": m.kind, "payload": m.payload, "bits": m.bits} for m in t.messages],
        "alice_correction": {"digits": list(t.alice_correction.digits), "sign": t.alice_correction.sign},
        "bob_correction": {"digits": list(t.bob_correction.digits), "sign": t.bob_correction.sign},
        "fidelity_at_bob": t.fidelity_at_bob,
        "fidelity_at_alice": t.fidelity_at_alice,
        "branch_probability": t.branch_probability,
        "bypass_guess": None if t.bypass_guess is None else list(t.bypass_guess),
    }


def transcript_from_dict(d: dict) -> ExchangeTranscript:
    return ExchangeTranscript(
        m=d["m"],
        n=d["n"],
        l=d["l"],
        input_xi=tuple(complex(re, im) for re, im in d["input_xi"]),
        input_eta=tuple(complex(re, im) for re, im in d["input_eta"]),
        r=d["r"],
        s=d["s"],
        charlie_outcome=d["charlie_outcome"],
        channel=tuple(d["channel"]),
        messages=tuple(ClassicalMessage(**m) for m in d["messages"]),
        alice_correction=PauliString(tuple(d["alice_correction"]["digits"]), d["alice_correction"]["sign"]),
        bob_correction=PauliString(tuple(d["bob_correction"]["digits"]), d["bob_correction"]["sign"]),
        fidelity_at_bob=d["fidelity_at_bob"],
        fidelity_at_alice=d["fidelity_at_alice"],
        branch_probability=d["branch_probability"],
        bypass_guess=None if d["bypass_guess"] is None else tuple(d["bypass_guess"]),
    )


def render_transcript(t: ExchangeTranscript) -> str:
    return json.dumps(transcript_to_dict(t), indent=2) + "\n"


def parse_transcript(text: str) -> ExchangeTranscript:
    return transcript_from_dict(json.loads(text))


def render_report_csv(report: SecurityReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["l", "exact", "mc", "mc_stderr", "bound"])
    for row in report.rows:
        w.writerow([row.l] + [f"{x:.12g}" for x in (row.exact, row.mc, row.mc_stderr, row.bound)])
    return buf.getvalue()


# ---------------------------------------------------------------- commands


def parse_l_range(text: str) -> list[int]:
    """``"3"`` or ``"0..5"`` (inclusive)."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _phi(text: str, size: int) -> Permutation:
    if text == "identity":
        return Permutation.identity(size)
    return Permutation(tuple(int(x) for x in text.split(",")))


def _emit(text: str, output: str | None, default_name: str) -> None:
    if output is None and os.environ.get(OUTPUT_DIR_ENV):
        output = str(Path(os.environ[OUTPUT_DIR_ENV]) / default_name)
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text)


def _input_state(source: str, k: int, rng: np.random.Generator) -> QuantumState:
    if source == "random":
        return random_state(k, rng)
    state = read_amplitudes(source)
    if state.num_qubits != k:
        raise InputError(f"{source}: holds {state.num_qubits} qubits, expected {k}")
    return state


def cmd_run(args) -> int:
    spec_l = 2 * max(args.m, args.n)
    total = 3 * (args.m + args.n) + spec_l
    if total > MAX_QUBITS:
        print(f"error: m={args.m}, n={args.n} needs {total} qubits (limit {MAX_QUBITS})", file=sys.stderr)
        return EXIT_TOO_BIG
    try:
        spec = ResourceSpec(args.m, args.n, phi=_phi(args.phi, 2**spec_l))
        rng = stream(args.seed, 0)
        xi = _input_state(args.input_a, args.m, rng)
        eta = _input_state(args.input_b, args.n, rng)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    t = run_exchange(spec, xi, eta, rng=stream(args.seed, 1))
    _emit(render_transcript(t), args.output, "transcript.json")
    print(
        f"fidelity_at_bob={t.fidelity_at_bob:.12f} fidelity_at_alice={t.fidelity_at_alice:.12f}",
        file=sys.stderr,
    )
    return EXIT_OK if t.succeeded else EXIT_FAILED


def cmd_sweep_security(args) -> int:
    ls = parse_l_range(args.l) if args.l else [2 * max(args.m, args.n)]
    try:
        report = security_sweep(args.m, args.n, ls, args.trials, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_VARIANT
    _emit(render_report_csv(report), args.output, "security.csv")
    return EXIT_OK


def run_checks(seed: int = 0, repetitions: int = 100) -> list[tuple[str, bool, str]]:
    """The verification suite behind ``sqie verify``: (name, passed, detail) triples."""
    results = []

    bad = pauli.product_table_mismatches()
    results.append(("pauli product table", not bad, f"mismatched entries: {bad}" if bad else "16 entries"))

    worst = 0.0
    for k in (1, 2, 3):
        basis = gbs_basis(k)
        worst = max(worst, float(np.abs(basis @ basis.conj().T - np.eye(4**k)).max()))
    results.append(("GBS orthonormality k<=3", worst < 1e-12, f"max Gram deviation {worst:.2e}"))

    rng = stream(seed, 0)
    worst = 0.0
    for k in (1, 2):
        for i in range(4**k):
            for _ in range(repetitions):
                psi = random_state(k, rng)
                for side in ("alice", "bob"):
                    worst = max(worst, verify_rewrite_identity(side, k, i, psi))
    results.append(("rewrite identities k<=2", worst < 1e-10, f"max deviation {worst:.2e}"))

    xi, eta = random_state(1, rng), random_state(1, rng)
    branches = enumerate_branches(None, xi, eta)
    total = sum(b.probability for b in branches)
    worst_f = min(min(b.transcript.fidelity_at_bob, b.transcript.fidelity_at_alice) for b in branches)
    ok = len(branches) == 64 and abs(total - 1) < 1e-9 and worst_f > 1 - 1e-10
    results.append(
        ("m=n=1 branch enumeration", ok,
         f"{len(branches)} branches, total probability {total:.12f}, min fidelity {worst_f:.12f}")
    )
    return results


def cmd_verify(args) -> int:
    results = run_checks(args.seed)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    failed = [name for name, ok, _ in results if not ok]
    if failed:
        print(f"first failure: {failed[0]}")
        return EXIT_FAILED
    print("all checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sqie", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--m", type=int, default=1, help="Alice's message size in qubits")
        p.add_argument("--n", type=int, default=1, help="Bob's message size in qubits")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", default=None, help="output file ('-' for stdout)")

    run = sub.add_parser("run", help="run one exchange and write its transcript")
    common(run)
    run.add_argument("--phi", default="identity", help="'identity' or comma-separated permutation")
    run.add_argument("--input-a", default="random", help="'random' or amplitude file for Alice")
    run.add_argument("--input-b", default="random", help="'random' or amplitude file for Bob")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep-security", help="bypass probability versus Charlie's qubit count")
    common(sweep)
    sweep.add_argument("--l", default=None, help="Charlie qubit count or inclusive range 'a..b'")
    sweep.add_argument("--trials", type=int, default=10000)
    sweep.set_defaults(func=cmd_sweep_security)

    verify = sub.add_parser("verify", help="run the algebraic and exhaustive checks")
    verify.add_argument("--seed", type=int, default=0)
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
