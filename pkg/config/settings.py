"""
Configuration settings for pmerge
"""

import os
import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, Any, Optional
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def setup_logging(level: Optional[str] = None, log_to_file: bool = True) -> Optional[Path]:
    """Setup logging configuration with optional file output

    Args:
        level: Logging level name (uses PMERGE_LOG_LEVEL / INFO if not provided)
        log_to_file: Also write a timestamped log file under the log directory

    Returns:
        Path to the log file, or None when file logging is off
    """
    logging_config = get_logging_config()
    level_name = (level or logging_config["level"]).upper()

    handlers = [logging.StreamHandler()]
    log_file = None
    if log_to_file:
        log_dir = Path(logging_config["log_dir"])
        log_dir.mkdir(exist_ok=True)

        log_filename = f"pmerge_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"
        log_file = log_dir / log_filename
        handlers.insert(0, logging.FileHandler(log_file, encoding='utf-8'))

    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=logging_config["format"],
        handlers=handlers,
        force=True,
    )

    logging.getLogger("pmerge_sdk").setLevel(level_name)
    logging.getLogger("pmerge_lab").setLevel(level_name)
    logging.getLogger("numpy").setLevel(logging.WARNING)
    logging.getLogger("scipy").setLevel(logging.WARNING)

    return log_file


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logging.getLogger(__name__).warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


def _env_flag(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


# Numerical solver configuration
SOLVER_CONFIG = {
    "bracket_eps": 1e-15,
    "max_iterations": 200,
    "residual_tolerance": 1e-12,
    "branch_snap": 1e-9,          # r this close to -1 or 0 uses the dedicated equation
    "scan_points": 400,           # sign-change scan before bisection
    "induced_depth": 52,          # M in the binary-search merge
    "exact_grid_limit": 512,      # grid harmonic exact enumeration up to this K
    "quad_tolerance": 1e-10,
    "convexity_grid": 512,
    "convexity_threshold": 1e-9,
    "lsc_shrink_steps": 30,
    "lsc_tolerance": 1e-12,
}

# Simulation configuration - can be overridden by environment variables
SIMULATION_CONFIG = {
    "seed": _env_int("PMERGE_SEED", 42),
    "threads": max(1, _env_int("PMERGE_THREADS", 1)),
    "cdf_grid_size": 512,
    "borderline_iterations": 80,
    "default_corner": 120,
    "default_alphas": (0.01, 0.05),
    "discretize_D": 10_000,
    "mu_alt": -5.0,
}

# Cache Configuration
CACHE_CONFIG = {
    "cache_dir": os.getenv("PMERGE_CACHE_DIR", ".cache"),
    "coefficient_cache_file": "m_coefficients.json",
    "persist_coefficients": _env_flag("PMERGE_PERSIST_COEFFS", False),
}

# Export Configuration
EXPORT_CONFIG = {
    "output_dir": os.getenv("PMERGE_OUTPUT_DIR", "exports"),
    "csv_encoding": "utf-8",
}

# Logging Configuration
LOGGING_CONFIG = {
    "level": os.getenv("PMERGE_LOG_LEVEL", "INFO"),
    "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    "log_dir": "logs",
}


def get_solver_config() -> Dict[str, Any]:
    """Get numerical solver configuration"""
    return SOLVER_CONFIG.copy()


def get_simulation_config() -> Dict[str, Any]:
    """Get simulation configuration with environment variable overrides"""
    return SIMULATION_CONFIG.copy()


def get_cache_config() -> Dict[str, Any]:
    """Get cache configuration"""
    return CACHE_CONFIG.copy()


def get_export_config() -> Dict[str, Any]:
    """Get export configuration"""
    return EXPORT_CONFIG.copy()


def get_logging_config() -> Dict[str, Any]:
    """Get logging configuration"""
    return LOGGING_CONFIG.copy()
