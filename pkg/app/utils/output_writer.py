import logging
import os
from typing import Optional

from app.config import Config

logger = logging.getLogger(__name__)


class OutputWriter:
    """Writes result files atomically"""

    def __init__(self, output_dir: Optional[str] = None):
        self.output_dir = output_dir or Config.OUTPUT_DIR

    def resolve(self, path: Optional[str], default_name: str) -> str:
        """Explicit path, or default_name inside the output directory"""
        if path:
            return os.path.abspath(path)
        if self.output_dir == Config.OUTPUT_DIR:
            Config.ensure_directories()
        else:
            os.makedirs(self.output_dir, exist_ok=True)
        return os.path.abspath(os.path.join(self.output_dir, default_name))

    def write(self, path: str, content: str) -> str:
        """Write to a temp file first, then rename over the target"""
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        temp_file = path + ".tmp"
        try:
            with open(temp_file, "w", encoding="utf-8") as f:
                f.write(content)
            os.replace(temp_file, path)
        except OSError as e:
            logger.error(f"Error writing {path}: {e}")
            if os.path.exists(temp_file):
                os.remove(temp_file)
            raise
        logger.info(f"Wrote {path}")
        return path
