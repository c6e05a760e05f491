"""NumPy fallback for the spectrum hot kernel.

Evaluates, for a batch of frequencies, the phonon-number spectral density

    S(w) = sum_kl chi[p, k](-w) * D[k, l] * chi[q, l](w),

where chi(w) = (-i*w*I - M)^-1 is the susceptibility of the linear Langevin
system dv/dt = M v + n, p indexes the creation-operator row and q the
annihilation-operator row.  Each frequency costs two small stacked solves;
the compiled twin in ``_kernels.pyx`` does the same arithmetic per-frequency
with hand-rolled pivoted elimination.
"""

import numpy as np


def spectrum_batch(M, D, omega, bdag_row, b_row):
    """Spectral density at every frequency in ``omega`` (complex values).

    The imaginary parts are round-off residue; callers check and discard
    them.  Raises ``numpy.linalg.LinAlgError`` if a frequency coincides with
    an undamped resonance.
    """
    M = np.asarray(M, dtype=complex)
    D = np.asarray(D, dtype=complex)
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    n = M.shape[0]
    eye = np.eye(n, dtype=complex)
    iw = 1j * w[:, None, None] * eye
    e_dag = np.zeros(n, dtype=complex)
    e_dag[bdag_row] = 1.0
    e_b = np.zeros(n, dtype=complex)
    e_b[b_row] = 1.0
    # row p of chi(-w) solves (i*w*I - M)^T u = e_p, and likewise for chi(w)
    u = np.linalg.solve(np.swapaxes(iw - M, -1, -2),
                        np.broadcast_to(e_dag, (w.size, n)))
    v = np.linalg.solve(np.swapaxes(-iw - M, -1, -2),
                        np.broadcast_to(e_b, (w.size, n)))
    return np.einsum("mk,kl,ml->m", u, D, v)
