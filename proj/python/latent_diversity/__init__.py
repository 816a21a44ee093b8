"""Within-set diversity of latent embeddings: truncated entropy (TIE/TCE),
Frechet distance, resampled significance tests and synthetic regimes."""

from latent_diversity._core import (
    DEFAULT_K,
    DiversityScore,
    EigenSpectrum,
    FidScore,
    LatentDiversityError,
    PairwiseResult,
    compare_values,
    covariance,
    diversity,
    fid,
    gaussian_entropy,
    generate_regime,
    load_embeddings,
    project_out_style,
    read_array,
    resample_scores,
    run_cli,
    sample_gaussian,
    tce,
    tie,
    top_k_eigenvalues,
    write_array,
)

__all__ = [
    "DEFAULT_K",
    "DiversityScore",
    "EigenSpectrum",
    "FidScore",
    "LatentDiversityError",
    "PairwiseResult",
    "compare_values",
    "covariance",
    "diversity",
    "fid",
    "gaussian_entropy",
    "generate_regime",
    "load_embeddings",
    "project_out_style",
    "read_array",
    "resample_scores",
    "run_cli",
    "sample_gaussian",
    "tce",
    "tie",
    "top_k_eigenvalues",
    "write_array",
]
