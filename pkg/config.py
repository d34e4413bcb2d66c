"""Configuration management for arborize."""

from typing import Optional
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Main application settings with all configurations."""

    model_config = SettingsConfigDict(
        env_prefix="ARBORIZE_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Runtime
    threads: Optional[int] = Field(None, ge=1)
    log_level: str = Field("WARNING")
    log_format: str = Field("json")

    # Exact LP
    enumeration_cap: int = Field(26, ge=1)

    # Brute-force oracle
    oracle_max_edges: int = Field(14, ge=0)
    oracle_max_colors: int = Field(16, ge=1)
    oracle_time_limit_seconds: float = Field(60.0, gt=0)

    # Branching pipelines
    resample_limit: int = Field(1_000_000, ge=1)
    asymptotic_attempts: int = Field(5, ge=1)
    budget_constant: int = Field(12, ge=0)
    transversal_node_limit: int = Field(2_000_000, ge=1)
    decimal_precision: int = Field(60, ge=20)

    # Orientation cross-checks
    et_subset_limit: int = Field(20, ge=1)

    # Gadget search
    search_max_vertices: int = Field(7, ge=2)
    search_max_total_mult: int = Field(12, ge=1)
    search_size_limit: int = Field(2_000_000, ge=1)

    # Convenience namespaces, same layout as the grouped settings elsewhere
    @property
    def lp(self):
        """Exact LP configuration namespace."""
        class LPConfig:
            def __init__(self, settings):
                self.enumeration_cap = settings.enumeration_cap
        return LPConfig(self)

    @property
    def oracle(self):
        """Brute-force oracle configuration namespace."""
        class OracleConfig:
            def __init__(self, settings):
                self.max_edges = settings.oracle_max_edges
                self.max_colors = settings.oracle_max_colors
                self.time_limit_seconds = settings.oracle_time_limit_seconds
        return OracleConfig(self)

    @property
    def pipeline(self):
        """Branching pipeline configuration namespace."""
        class PipelineConfig:
            def __init__(self, settings):
                self.resample_limit = settings.resample_limit
                self.asymptotic_attempts = settings.asymptotic_attempts
                self.budget_constant = settings.budget_constant
                self.transversal_node_limit = settings.transversal_node_limit
                self.decimal_precision = settings.decimal_precision
                self.et_subset_limit = settings.et_subset_limit
        return PipelineConfig(self)

    @property
    def search(self):
        """Gadget search configuration namespace."""
        class SearchConfig:
            def __init__(self, settings):
                self.max_vertices = settings.search_max_vertices
                self.max_total_mult = settings.search_max_total_mult
                self.size_limit = settings.search_size_limit
                self.threads = settings.threads
        return SearchConfig(self)


# Global settings instance
settings = Settings()
