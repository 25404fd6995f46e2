"""Reversible-circuit netlists and lowering to the fault-tolerant gate set.

A circuit is an ordered gate list over ``qubit_count`` logical qubits.  Input
netlists may contain high-level reversible gates (NOT, multi-control Toffoli,
Fredkin); the lowering pipeline rewrites them into the fault-tolerant set
{CNOT, H, T, T-dagger, S, X, Y, Z} in three stages:

    decompose_multicontrol -> fredkin_to_toffoli -> toffoli_to_ft

Gate order is stable: gates untouched by a stage keep their relative order.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field


class GateKind(enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    T = "t"
    TDAG = "tdag"
    CNOT = "cnot"
    # pre-lowering gates
    NOT = "not"
    TOFFOLI = "toffoli"
    FREDKIN = "fredkin"


#: Gates every tile of the fabric can execute directly.
FT_GATES = frozenset({
    GateKind.X, GateKind.Y, GateKind.Z, GateKind.H,
    GateKind.S, GateKind.T, GateKind.TDAG, GateKind.CNOT,
})

#: One-qubit members of the fault-tolerant set.
ONE_QUBIT_FT = frozenset(FT_GATES - {GateKind.CNOT})


class NetlistError(ValueError):
    """Raised on malformed netlist input; carries source line/column."""

    def __init__(self, message: str, line: int, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Gate:
    """One gate application.

    ``operands`` are qubit indices.  For CNOT that is ``(control, target)``;
    a Toffoli lists its controls followed by the target; a Fredkin lists its
    controls followed by the two swapped targets.
    """

    kind: GateKind
    operands: tuple[int, ...]

    def __post_init__(self) -> None:
        ops = self.operands
        if len(set(ops)) != len(ops):
            raise ValueError(f"duplicate operand in {self.kind.value} gate: {ops}")
        k = self.kind
        if k in ONE_QUBIT_FT or k is GateKind.NOT:
            expected = len(ops) == 1
        elif k is GateKind.CNOT:
            expected = len(ops) == 2
        else:  # TOFFOLI: >= 2 controls + target; FREDKIN: >= 1 control + 2 targets
            expected = len(ops) >= 3
        if not expected:
            raise ValueError(f"{k.value} gate with {len(ops)} operands: {ops}")

    @property
    def controls(self) -> tuple[int, ...]:
        if self.kind is GateKind.TOFFOLI:
            return self.operands[:-1]
        if self.kind is GateKind.FREDKIN:
            return self.operands[:-2]
        if self.kind is GateKind.CNOT:
            return self.operands[:1]
        return ()

    @property
    def targets(self) -> tuple[int, ...]:
        if self.kind is GateKind.FREDKIN:
            return self.operands[-2:]
        if self.kind in (GateKind.TOFFOLI, GateKind.CNOT):
            return self.operands[-1:]
        return self.operands


@dataclass(frozen=True)
class Circuit:
    """An ordered gate sequence over ``qubit_count`` qubits."""

    qubit_count: int
    gates: tuple[Gate, ...] = ()
    qubit_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.qubit_count < 1:
            raise ValueError("qubit_count must be >= 1")
        for g in self.gates:
            if max(g.operands) >= self.qubit_count:
                raise ValueError(
                    f"gate {g.kind.value} touches qubit {max(g.operands)} "
                    f"but circuit has {self.qubit_count} qubits")
        if self.qubit_labels is not None and len(self.qubit_labels) != self.qubit_count:
            raise ValueError("qubit_labels length must equal qubit_count")

    @property
    def is_ft(self) -> bool:
        return all(g.kind in FT_GATES for g in self.gates)

    @property
    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if g.kind is GateKind.CNOT)


# ---------------------------------------------------------------------------
# Netlist parsing / serialization
# ---------------------------------------------------------------------------

_MNEMONICS = {k.value: k for k in GateKind}

_MIN_ARITY = {GateKind.TOFFOLI: 3, GateKind.FREDKIN: 3}
_FIXED_ARITY = {GateKind.CNOT: 2, GateKind.NOT: 1}
_FIXED_ARITY.update({k: 1 for k in ONE_QUBIT_FT})


def _column(raw: str, token: str) -> int:
    idx = raw.find(token)
    return idx + 1 if idx >= 0 else 1


def _parse_qubit_token(token: str, qubit_count: int, lineno: int, raw: str) -> int:
    text = token[1:] if token[0] in "qQ" else token
    if not text.isdigit():
        raise NetlistError(f"bad qubit token {token!r}", lineno, _column(raw, token))
    idx = int(text)
    if idx >= qubit_count:
        raise NetlistError(
            f"undeclared qubit {token!r} (only {qubit_count} declared)",
            lineno, _column(raw, token))
    return idx


def parse_netlist(text: str) -> Circuit:
    """Parse the line-based netlist format.

    First non-comment line is ``qubits <N>``; each following line is
    ``<mnemonic> <q...>``.  ``#`` starts a comment.  Qubit tokens are ``q3``
    or a bare index.
    """
    qubit_count: int | None = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if qubit_count is None:
            if tokens[0].lower() != "qubits" or len(tokens) != 2 or not tokens[1].isdigit():
                raise NetlistError("expected 'qubits <N>' declaration", lineno)
            qubit_count = int(tokens[1])
            if qubit_count < 1:
                raise NetlistError("qubit count must be >= 1", lineno, _column(raw, tokens[1]))
            continue
        mnemonic = tokens[0].lower()
        kind = _MNEMONICS.get(mnemonic)
        if kind is None:
            raise NetlistError(f"unknown gate mnemonic {tokens[0]!r}", lineno, _column(raw, tokens[0]))
        operands = tuple(
            _parse_qubit_token(tok, qubit_count, lineno, raw) for tok in tokens[1:])
        fixed = _FIXED_ARITY.get(kind)
        if fixed is not None and len(operands) != fixed:
            raise NetlistError(
                f"{mnemonic} expects {fixed} operand(s), got {len(operands)}", lineno)
        if kind in _MIN_ARITY and len(operands) < _MIN_ARITY[kind]:
            raise NetlistError(
                f"{mnemonic} expects at least {_MIN_ARITY[kind]} operands, got {len(operands)}",
                lineno)
        if len(set(operands)) != len(operands):
            raise NetlistError(f"duplicate operand in {mnemonic} gate", lineno)
        gates.append(Gate(kind, operands))
    if qubit_count is None:
        raise NetlistError("missing 'qubits <N>' declaration", max(1, text.count("\n") + 1))
    return Circuit(qubit_count, tuple(gates))


def serialize_netlist(circuit: Circuit) -> str:
    """Render a circuit back to netlist text (inverse of :func:`parse_netlist`)."""
    lines = [f"qubits {circuit.qubit_count}"]
    for g in circuit.gates:
        lines.append(" ".join([g.kind.value, *(f"q{i}" for i in g.operands)]))
    return "\n".join(lines) + "\n"


_REAL_GATE = re.compile(r"^([tf])(\d+)$")


def parse_real(text: str) -> Circuit:
    """Best-effort reader for ``.real``-style reversible benchmark files.

    Understands ``.numvars``, ``.variables``, ``.begin``/``.end`` and gate
    lines ``t<n>`` (n-input Toffoli; ``t1`` is NOT, ``t2`` is CNOT) and
    ``f<n>`` (n-input Fredkin).  Other dot-directives are ignored.
    """
    qubit_count: int | None = None
    names: list[str] = []
    index: dict[str, int] = {}
    gates: list[Gate] = []
    in_body = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0].lower()
        if head.startswith("."):
            if head == ".numvars":
                if len(tokens) != 2 or not tokens[1].isdigit():
                    raise NetlistError("bad .numvars directive", lineno)
                qubit_count = int(tokens[1])
            elif head == ".variables":
                names = tokens[1:]
                index = {name: i for i, name in enumerate(names)}
            elif head == ".begin":
                in_body = True
            elif head == ".end":
                in_body = False
            # .version/.inputs/.outputs/.constants/.garbage etc. are ignored
            continue
        if not in_body:
            continue
        if qubit_count is None:
            raise NetlistError("gate before .numvars", lineno)
        if not index:
            names = [f"x{i}" for i in range(qubit_count)]
            index = {name: i for i, name in enumerate(names)}
        m = _REAL_GATE.match(head)
        if m is None:
            raise NetlistError(f"unsupported gate {tokens[0]!r}", lineno, _column(raw, tokens[0]))
        family, size = m.group(1), int(m.group(2))
        operands = []
        for tok in tokens[1:]:
            if tok not in index:
                raise NetlistError(f"unknown variable {tok!r}", lineno, _column(raw, tok))
            operands.append(index[tok])
        if len(operands) != size:
            raise NetlistError(
                f"{head} expects {size} operands, got {len(operands)}", lineno)
        if len(set(operands)) != len(operands):
            raise NetlistError(f"duplicate operand in {head} gate", lineno)
        ops = tuple(operands)
        if family == "t":
            if size == 1:
                gates.append(Gate(GateKind.NOT, ops))
            elif size == 2:
                gates.append(Gate(GateKind.CNOT, ops))
            else:
                gates.append(Gate(GateKind.TOFFOLI, ops))
        else:
            if size < 3:
                raise NetlistError(f"fredkin needs >= 3 lines, got {size}", lineno)
            gates.append(Gate(GateKind.FREDKIN, ops))
    if qubit_count is None:
        raise NetlistError("missing .numvars directive", max(1, text.count("\n") + 1))
    return Circuit(qubit_count, tuple(gates), tuple(names) if names else None)


def load(path: str) -> Circuit:
    """Read a circuit file, picking the parser from the file extension."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if str(path).lower().endswith(".real"):
        return parse_real(text)
    return parse_netlist(text)


# ---------------------------------------------------------------------------
# Lowering pipeline
# ---------------------------------------------------------------------------

def decompose_multicontrol(circuit: Circuit) -> Circuit:
    """Rewrite wide Toffoli/Fredkin gates into 3-operand ones.

    A Toffoli with k >= 3 controls becomes a chain of 3-input Toffolis that
    ANDs the controls into k - 2 fresh ancilla qubits, applies the target
    flip, and uncomputes the chain.  A Fredkin with k >= 2 controls gets the
    same treatment with k - 1 ancillas feeding a single-control Fredkin.
    Ancillas are never shared between decomposed gates; each starts and ends
    in |0>.
    """
    gates: list[Gate] = []
    next_ancilla = circuit.qubit_count
    for g in circuit.gates:
        if g.kind is GateKind.TOFFOLI and len(g.controls) > 2:
            ctrls, target = g.controls, g.operands[-1]
            anc = list(range(next_ancilla, next_ancilla + len(ctrls) - 2))
            next_ancilla += len(anc)
            compute = [Gate(GateKind.TOFFOLI, (ctrls[0], ctrls[1], anc[0]))]
            for j in range(1, len(anc)):
                compute.append(Gate(GateKind.TOFFOLI, (ctrls[j + 1], anc[j - 1], anc[j])))
            gates.extend(compute)
            gates.append(Gate(GateKind.TOFFOLI, (ctrls[-1], anc[-1], target)))
            gates.extend(reversed(compute))
        elif g.kind is GateKind.FREDKIN and len(g.controls) > 1:
            ctrls, (t1, t2) = g.controls, g.targets
            anc = list(range(next_ancilla, next_ancilla + len(ctrls) - 1))
            next_ancilla += len(anc)
            compute = [Gate(GateKind.TOFFOLI, (ctrls[0], ctrls[1], anc[0]))]
            for j in range(1, len(anc)):
                compute.append(Gate(GateKind.TOFFOLI, (ctrls[j + 1], anc[j - 1], anc[j])))
            gates.extend(compute)
            gates.append(Gate(GateKind.FREDKIN, (anc[-1], t1, t2)))
            gates.extend(reversed(compute))
        else:
            gates.append(g)
    labels = circuit.qubit_labels
    if labels is not None and next_ancilla > circuit.qubit_count:
        labels = labels + tuple(
            f"anc{i}" for i in range(next_ancilla - circuit.qubit_count))
    return Circuit(next_ancilla, tuple(gates), labels)


def fredkin_to_toffoli(circuit: Circuit) -> Circuit:
    """Replace every single-control Fredkin with three Toffoli gates."""
    gates: list[Gate] = []
    for g in circuit.gates:
        if g.kind is GateKind.FREDKIN:
            if len(g.controls) != 1:
                raise ValueError("multi-control fredkin: run decompose_multicontrol first")
            c, (a, b) = g.controls[0], g.targets
            gates.append(Gate(GateKind.TOFFOLI, (c, b, a)))
            gates.append(Gate(GateKind.TOFFOLI, (c, a, b)))
            gates.append(Gate(GateKind.TOFFOLI, (c, b, a)))
        else:
            gates.append(g)
    return Circuit(circuit.qubit_count, tuple(gates), circuit.qubit_labels)


def _toffoli_network(a: int, b: int, t: int) -> list[Gate]:
    # 15-gate network: 6 CNOT, 7 T/T-dagger, 2 H.
    K = GateKind
    return [
        Gate(K.H, (t,)),
        Gate(K.CNOT, (b, t)),
        Gate(K.TDAG, (t,)),
        Gate(K.CNOT, (a, t)),
        Gate(K.T, (t,)),
        Gate(K.CNOT, (b, t)),
        Gate(K.TDAG, (t,)),
        Gate(K.CNOT, (a, t)),
        Gate(K.T, (b,)),
        Gate(K.T, (t,)),
        Gate(K.H, (t,)),
        Gate(K.CNOT, (a, b)),
        Gate(K.T, (a,)),
        Gate(K.TDAG, (b,)),
        Gate(K.CNOT, (a, b)),
    ]


def toffoli_to_ft(circuit: Circuit) -> Circuit:
    """Expand 2-control Toffolis into the 15-gate network; rename NOT to X."""
    gates: list[Gate] = []
    for g in circuit.gates:
        if g.kind is GateKind.TOFFOLI:
            if len(g.controls) != 2:
                raise ValueError("wide toffoli: run decompose_multicontrol first")
            a, b = g.controls
            gates.extend(_toffoli_network(a, b, g.operands[-1]))
        elif g.kind is GateKind.FREDKIN:
            raise ValueError("fredkin present: run fredkin_to_toffoli first")
        elif g.kind is GateKind.NOT:
            gates.append(Gate(GateKind.X, g.operands))
        else:
            gates.append(g)
    return Circuit(circuit.qubit_count, tuple(gates), circuit.qubit_labels)


def lower_to_ft(circuit: Circuit) -> Circuit:
    """Run the full lowering pipeline down to the fault-tolerant gate set."""
    return toffoli_to_ft(fredkin_to_toffoli(decompose_multicontrol(circuit)))
