import asyncio
import hashlib
import logging
from typing import Callable, List

import aiofiles

from app.config import Config
from app.models.schemas import CommandOutput, RunDocument
from app.utils.exceptions import GraphExtError

logger = logging.getLogger(__name__)

Handler = Callable[[str, str], CommandOutput]


class BatchService:
    """Runs one command over many input files, at most `jobs` at a time"""

    def __init__(self, command: str, handler: Handler):
        self.command = command
        self.handler = handler

    async def process_file(self, path: str) -> RunDocument:
        """Read and process a single file; errors become part of its document"""
        try:
            async with aiofiles.open(path, "rb") as f:
                raw = await f.read()
        except OSError as e:
            logger.error(f"Cannot read {path}: {e}")
            return RunDocument(command=self.command, input=path, exit_code=2, error=f"cannot read {path}: {e}")

        digest = hashlib.sha256(raw).hexdigest()
        try:
            text = raw.decode("utf-8")
            # Computations are CPU-bound; run them off the event loop.
            output = await asyncio.to_thread(self.handler, text, path)
            return RunDocument(
                command=self.command,
                input=path,
                input_sha256=digest,
                result=output.result,
                text=output.text,
                dot=output.dot,
            )
        except UnicodeDecodeError as e:
            logger.error(f"{path} is not UTF-8: {e}")
            return RunDocument(command=self.command, input=path, input_sha256=digest, exit_code=2, error=str(e))
        except GraphExtError as e:
            logger.error(f"{path}: {e.detail}")
            return RunDocument(
                command=self.command, input=path, input_sha256=digest, exit_code=e.exit_code, error=e.detail
            )

    async def run(self, paths: List[str], jobs: int = 1) -> List[RunDocument]:
        """Process files in batches; results keep input order"""
        jobs = max(1, min(jobs, Config.MAX_JOBS))
        logger.info(f"Processing {len(paths)} files with {jobs} jobs")

        documents: List[RunDocument] = []
        for i in range(0, len(paths), jobs):
            batch = paths[i:i + jobs]
            logger.debug(f"Processing batch {i // jobs + 1}, {len(batch)} files")
            results = await asyncio.gather(*(self.process_file(p) for p in batch), return_exceptions=True)
            for path, result in zip(batch, results):
                if isinstance(result, Exception):
                    logger.error(f"Unexpected error on {path}: {result}", exc_info=result)
                    result = RunDocument(command=self.command, input=path, exit_code=1, error=str(result))
                documents.append(result)

        failed = sum(1 for d in documents if d.exit_code)
        logger.info(f"Batch completed: {len(documents) - failed} succeeded, {failed} failed")
        return documents
