"""Named two-qubit gates, local rotations and parameterized circuit templates.

All matrices are written in the ancilla-first basis ``{|00>,|01>,|10>,|11>}_as``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ArityMismatch
from .linalg import kron

I2 = np.eye(2, dtype=complex)

CNOT_AS = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]], dtype=complex)  # ancilla controls, system flips

CNOT_SA = np.array(
    [[1, 0, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0],
     [0, 1, 0, 0]], dtype=complex)  # system controls, ancilla flips

SWAP = CNOT_AS @ CNOT_SA @ CNOT_AS

_NAMED = {
    "CNOT_as": CNOT_AS,
    "CNOT_sa": CNOT_SA,
    "SWAP": SWAP,
    "IDENTITY": np.eye(4, dtype=complex),
}


def named_gate(name):
    try:
        return _NAMED[name].copy()
    except KeyError:
        raise ValueError(f"unknown gate {name!r}; known: {sorted(_NAMED)}") from None


def rotation(angle):
    """``R(a) = cos(a) I + i sin(a) sigma_y = [[cos a, sin a], [-sin a, cos a]]``.

    On the Bloch sphere this is a rotation by ``-2 a`` about the y axis.
    """
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]], dtype=complex)


def local_rotation(target, angle):
    """``R(angle)`` on qubit ``target`` ('a' or 's'), identity on the other."""
    if target in ("a", "ancilla"):
        return kron(rotation(angle), I2)
    if target in ("s", "system"):
        return kron(I2, rotation(angle))
    raise ValueError(f"unknown target {target!r}; expected 'a' or 's'")


ELEMENTS = ("RotS", "RotA", "CNOT_as", "CNOT_sa")
ROLES = ("any", "upper", "lower")


@dataclass(frozen=True)
class CircuitTemplate:
    """A gate sequence with one free angle per rotation.

    ``elements`` are listed in the order the gates act (circuit-diagram order,
    left to right in time), so the compiled unitary is
    ``U = G_k ... G_2 G_1``. Angles fill the rotation slots in that same order.
    """

    name: str
    elements: tuple
    role: str = "any"

    def __post_init__(self):
        bad = [e for e in self.elements if e not in ELEMENTS]
        if bad:
            raise ValueError(f"unknown template elements {bad}; allowed: {ELEMENTS}")
        if self.role not in ROLES:
            raise ValueError(f"unknown template role {self.role!r}; allowed: {ROLES}")

    @property
    def n_params(self):
        return sum(e.startswith("Rot") for e in self.elements)

    def __str__(self):
        return " ".join(self.elements)


def compile_template(template, params=()):
    params = list(np.atleast_1d(np.asarray(params, dtype=float))) if len(params) else []
    if len(params) != template.n_params:
        raise ArityMismatch(
            f"template {template.name!r} takes {template.n_params} angles, got {len(params)}")
    u = np.eye(4, dtype=complex)
    it = iter(params)
    for e in template.elements:
        if e == "RotS":
            g = local_rotation("s", next(it))
        elif e == "RotA":
            g = local_rotation("a", next(it))
        else:
            g = _NAMED[e]
        u = g @ u
    return u


def parse_template(name, text, role="any"):
    """Template from whitespace-separated tokens, e.g. ``"RotA CNOT_as RotS CNOT_sa"``."""
    return CircuitTemplate(name, tuple(text.split()), role)


def load_templates(path):
    """Read ``NAME [role]: tokens`` lines; blank lines and ``#`` comments are skipped.

    ``role`` is ``upper``, ``lower`` or ``any`` (the default) and restricts
    which boundary direction the template is used to label.
    """
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, sep, body = line.partition(":")
            if not sep:
                raise ValueError(f"template line without 'NAME:' prefix: {raw!r}")
            words = head.split()
            if len(words) not in (1, 2):
                raise ValueError(f"bad template header {head!r}")
            role = words[1] if len(words) == 2 else "any"
            out[words[0]] = parse_template(words[0], body, role)
    return out


# Checked against the full-U(4) optimum at p_w = 0.75 with a pure ancilla.
# A: local rotations of s, the vertical segment at P = P_in.
# B: ancilla-controlled flip (bit-flip channel), upper frontier below P_in.
# C: B followed by a rotation of s, flat lower frontier below P_in.
# D: E followed by a rotation of s, lower frontier above P_in.
# E: controlled rotation of a then ancilla-controlled flip (amplitude
#    damping), upper frontier above P_in.
DEFAULT_TEMPLATES = {
    "A": CircuitTemplate("A", ("RotS",), "any"),
    "B": CircuitTemplate("B", ("RotA", "CNOT_as"), "upper"),
    "C": CircuitTemplate("C", ("RotA", "CNOT_as", "RotS"), "lower"),
    "D": CircuitTemplate("D", ("RotA", "CNOT_sa", "RotA", "CNOT_as", "RotS"), "lower"),
    "E": CircuitTemplate("E", ("RotA", "CNOT_sa", "RotA", "CNOT_as"), "upper"),
}

# Initial hypotheses, kept for comparison; several collapse to trivial or
# redundant channels when the ancilla starts in |0>.
HYPOTHESIS_TEMPLATES = {
    "A": CircuitTemplate("A", ("RotS",)),
    "B": CircuitTemplate("B", ("RotA", "CNOT_as")),
    "C": CircuitTemplate("C", ("CNOT_as", "RotA", "CNOT_sa")),
    "D": CircuitTemplate("D", ("RotS", "CNOT_sa", "RotA")),
    "E": CircuitTemplate("E", ("RotA", "CNOT_as", "RotS", "CNOT_sa")),
}
