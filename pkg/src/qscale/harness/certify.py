"""Empirical thresholds for the theta-representation remainder bounds."""
from __future__ import annotations

from mpmath import mpf

from ..asymptotics import lemma_g_theta_rep, lemma_h_theta_rep, lemma_phi_theta_rep
from ..numkernel import LogRealValue, Precision
from ..qpochhammer import QParameter
from ..qseries import ConfluentParams, SeriesSpec

N_RANGE = tuple(range(1, 65))
Q_DEFAULT = "0.5"
Z_DEFAULT = ("0.5", "2")
# r_g and r_h on the empty spec with ell = 1; r_phi on 0-phi-1 with beta = 1/2, which also has ell = 1
LEMMAS = {
    "r_g": (lemma_g_theta_rep, lambda: SeriesSpec((), (), (), 1)),
    "r_phi": (lemma_phi_theta_rep, lambda: ConfluentParams((), (mpf(1) / 2,))),
    "r_h": (lemma_h_theta_rep, lambda: SeriesSpec((), (), (), 1)),
}


def certificate_rows(kind: str, n_values=N_RANGE, zs=Z_DEFAULT, q=Q_DEFAULT, precision: Precision = Precision()):
    """``[(n, z, RemainderCertificate)]`` over the grid, n-major."""
    lemma, make = LEMMAS[kind]
    rows = []
    with precision.workdps():
        qp = QParameter.from_q(mpf(q))
        arg = make()
        for n in n_values:
            for z in zs:
                _, cert = lemma(arg, qp, LogRealValue.from_number(mpf(z)), n)
                rows.append((n, z, cert))
    return rows


def threshold(rows) -> int:
    """Smallest n from which every certificate on the grid holds."""
    failing = [n for n, _, cert in rows if not cert.holds]
    if not failing:
        return min(n for n, _, _ in rows)
    return max(failing) + 1
