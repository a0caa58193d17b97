import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    """Application configuration"""

    # Logging
    LOG_LEVEL = os.getenv("GRAPHEXT_LOG_LEVEL", "WARNING")  # raised by --verbose
    SNF_TRACE_LIMIT = int(os.getenv("GRAPHEXT_SNF_TRACE_LIMIT", "200"))  # SNF steps logged at -vv

    # Batch execution
    MAX_JOBS = int(os.getenv("GRAPHEXT_MAX_JOBS", "4"))

    # Output
    DEFAULT_FORMAT = os.getenv("GRAPHEXT_DEFAULT_FORMAT", "text")
    OUTPUT_DIR = os.path.abspath(os.getenv("GRAPHEXT_OUTPUT_DIR", "output"))

    # Randomized checks
    RANDOM_SEED = int(os.getenv("GRAPHEXT_RANDOM_SEED", "0"))

    # Unimodularity is confirmed by exact determinant up to this dimension
    DET_CHECK_LIMIT = int(os.getenv("GRAPHEXT_DET_CHECK_LIMIT", "8"))

    # Ext groups and positive vectors kept per service instance
    CACHE_SIZE = int(os.getenv("GRAPHEXT_CACHE_SIZE", "128"))

    @classmethod
    def ensure_directories(cls):
        """Ensure the output directory exists"""
        os.makedirs(cls.OUTPUT_DIR, exist_ok=True)
