from ._repokva import (
    ConfigError,
    NumericalError,
    Pipeline,
    hazard_from_cds,
    npv_star_bp,
    reference_config_text,
    risky_annuity,
    settlement_loss,
)

__all__ = [
    "ConfigError",
    "NumericalError",
    "Pipeline",
    "hazard_from_cds",
    "npv_star_bp",
    "reference_config_text",
    "risky_annuity",
    "settlement_loss",
    "price",
]


def price(config_text=None, seed=None, paths=None):
    """Table rows (list of dicts, bp of principal) for every configured haircut."""
    text = reference_config_text() if config_text is None else config_text
    return Pipeline(text, seed=seed, paths=paths).price()
