from .shells import (
    WaveVector,
    ModeBand,
    eigenvalue,
    enumerate_shell,
    shell_array,
    min_pair_separation,
    search_separated_N,
    mode_band,
    retained_vectors,
)
from .certificate import (
    ShellCertificate,
    schur_bound,
    coupling_matrix,
    certify_range,
    load_phi_hat,
)

__all__ = [
    "WaveVector",
    "ModeBand",
    "eigenvalue",
    "enumerate_shell",
    "shell_array",
    "min_pair_separation",
    "search_separated_N",
    "mode_band",
    "retained_vectors",
    "ShellCertificate",
    "schur_bound",
    "coupling_matrix",
    "certify_range",
    "load_phi_hat",
]
