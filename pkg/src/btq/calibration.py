"""Runtime calibration of the open sign conventions, and the ledger file
that freezes them.

Two signs are not pinned by the formulas alone: the analyst-vs-geometer
sign of the Laplacian (selected by requiring Tuynman's relation
Q_f = i T_{f - Lap f/(2m)} to hold against the directly assembled
geometric-quantization operator) and the global sign of the Poisson
structure constant (selected by requiring the commutator defect
||m i [T_f, T_g] - T_{f,g}|| to decay instead of saturating at O(1)).
Both selections are recorded with their measured defects in a small JSON
ledger so later runs can load rather than re-measure them.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .errors import CalibrationError, LedgerError
from .geometry import KahlerConventions, TOTAL_AREA
from .operators import (QuantumOperator, commutator, operator_norm, prequantum,
                        toeplitz, tuynman_rhs)
from .symbols import X1, X2, X3, poisson_bracket

LEDGER_ENV = "BTQ_LEDGER"
LEDGER_NAME = "btq_conventions.json"
LEDGER_FORMAT = "btq-conventions-v1"

_TUYNMAN_TOL = 1e-8
_DECAY_RATIO = 0.8


def ledger_path(explicit=None):
    """Resolve the ledger location: explicit arg, BTQ_LEDGER env, or cwd."""
    if explicit:
        return explicit
    return os.environ.get(LEDGER_ENV) or os.path.join(os.getcwd(), LEDGER_NAME)


def _laplace_defect(sign, m=4):
    conv = KahlerConventions(laplace_sign=sign)
    lhs = prequantum(X3, m)
    rhs = tuynman_rhs(X3, m, conv)
    return float(np.max(np.abs(lhs.mat - rhs.mat)))


def _commutator_defect(c_sign, m):
    conv = KahlerConventions(poisson_constant=2.0 * c_sign)
    tf = toeplitz(X1, m)
    tg = toeplitz(X2, m)
    tfg = toeplitz(poisson_bracket(X1, X2, conv), m)
    defect = (1j * m) * commutator(tf, tg) - tfg
    return operator_norm(QuantumOperator(m, defect.mat))


def calibrate(tuynman_level=4, poisson_levels=(8, 32)):
    """Measure both signs of each convention and select the consistent ones.

    Returns (KahlerConventions, diagnostics).  Raises CalibrationError when
    no sign choice meets tolerance, which signals an implementation bug
    rather than a recoverable condition.
    """
    lap = {sign: _laplace_defect(sign, tuynman_level) for sign in (1, -1)}
    lap_ok = [s for s, d in lap.items() if d <= _TUYNMAN_TOL]
    if len(lap_ok) != 1:
        raise CalibrationError(
            f"Laplacian sign ambiguous: Tuynman defects {lap}")
    laplace_sign = lap_ok[0]

    m_lo, m_hi = poisson_levels
    pois = {sign: (_commutator_defect(sign, m_lo), _commutator_defect(sign, m_hi))
            for sign in (1, -1)}
    pois_ok = [s for s, (dlo, dhi) in pois.items() if dhi < _DECAY_RATIO * dlo]
    if len(pois_ok) != 1:
        raise CalibrationError(
            f"Poisson sign ambiguous: commutator defects {pois}")
    poisson_sign = pois_ok[0]

    conv = KahlerConventions(poisson_constant=2.0 * poisson_sign,
                             laplace_sign=laplace_sign)
    diagnostics = {
        "tuynman_level": tuynman_level,
        "tuynman_defects": {str(s): lap[s] for s in (1, -1)},
        "poisson_levels": list(poisson_levels),
        "commutator_defects": {str(s): list(pois[s]) for s in (1, -1)},
    }
    return conv, diagnostics


def ledger_payload(conv, diagnostics):
    return {
        "format": LEDGER_FORMAT,
        "total_area": TOTAL_AREA,
        "poisson_constant": conv.poisson_constant,
        "laplace_sign": conv.laplace_sign,
        "laplace_scale": conv.laplace_scale,
        "diagnostics": diagnostics,
    }


def ledger_bytes(conv, diagnostics):
    return (json.dumps(ledger_payload(conv, diagnostics),
                       indent=2, sort_keys=True) + "\n").encode()


def write_ledger(path, conv, diagnostics):
    """Atomic write (temp + rename); byte-deterministic for identical input."""
    payload = ledger_bytes(conv, diagnostics)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".btq_ledger_")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_ledger(path):
    """Read a conventions ledger; LedgerError when missing keys or invalid."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise
    except (OSError, json.JSONDecodeError) as exc:
        raise LedgerError(f"unreadable conventions ledger {path}: {exc}") from exc
    try:
        if obj["format"] != LEDGER_FORMAT:
            raise LedgerError(f"unknown ledger format {obj['format']!r}")
        conv = KahlerConventions(
            total_area=float(obj["total_area"]),
            poisson_constant=float(obj["poisson_constant"]),
            laplace_sign=int(obj["laplace_sign"]),
            laplace_scale=float(obj["laplace_scale"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise LedgerError(f"conventions ledger {path} is corrupted: {exc}") from exc
    if conv.laplace_sign not in (1, -1) or abs(conv.poisson_constant) != 2.0:
        raise LedgerError(f"conventions ledger {path} holds out-of-range values")
    return conv
