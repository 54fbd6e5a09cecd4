"""
Artifact storage for run outputs: a local directory or a gs://bucket/prefix.
"""
import asyncio
import logging
import os
from typing import Dict, List, Optional, Union

from linewalk.core.errors import artifact_io_exception

logger = logging.getLogger(__name__)

try:
    from google.cloud import storage as gcs
    GCS_AVAILABLE = True
except ImportError:
    GCS_AVAILABLE = False
    logger.debug("Google Cloud Storage not available - local artifacts only")

GCS_SCHEME = "gs://"


class ArtifactStore:
    """Writes named artifacts below one output location.

    Args:
        out: A directory path, or gs://bucket[/prefix] (requires google-cloud-storage).
    """

    def __init__(self, out: str):
        self.out = out
        self._is_cloud = out.startswith(GCS_SCHEME)
        if self._is_cloud:
            if not GCS_AVAILABLE:
                raise artifact_io_exception(out, "google-cloud-storage is not installed")
            bucket, _, prefix = out[len(GCS_SCHEME):].partition("/")
            self._client = gcs.Client()
            self._bucket = self._client.bucket(bucket)
            self._prefix = prefix.strip("/")
            logger.info(f"Artifact store on GCS bucket {bucket} (prefix '{self._prefix}')")
        else:
            self._root = os.path.abspath(out)
            logger.debug(f"Artifact store at {self._root}")

    def _blob_name(self, filename: str) -> str:
        return f"{self._prefix}/{filename}" if self._prefix else filename

    def location(self, filename: str) -> str:
        if self._is_cloud:
            return f"{GCS_SCHEME}{self._bucket.name}/{self._blob_name(filename)}"
        return os.path.join(self._root, filename)

    async def save_file(self, content: Union[bytes, str], filename: str) -> str:
        """Saves one artifact and returns where it went."""
        if isinstance(content, str):
            content = content.encode("utf-8")
        target = self.location(filename)
        try:
            if self._is_cloud:
                blob = self._bucket.blob(self._blob_name(filename))
                await asyncio.to_thread(blob.upload_from_string, content)
            else:
                await asyncio.to_thread(os.makedirs, os.path.dirname(target), exist_ok=True)

                def write_local_file():
                    with open(target, "wb") as f:
                        f.write(content)

                await asyncio.to_thread(write_local_file)
        except OSError as e:
            raise artifact_io_exception(target, str(e))
        logger.info(f"Wrote artifact {target} ({len(content)} bytes)")
        return target

    async def list_files(self, prefix: Optional[str] = None) -> List[Dict[str, Union[str, int]]]:
        """Artifacts as {'name', 'size'} dicts, sorted by name."""
        if self._is_cloud:
            search = self._blob_name(prefix or "")

            def list_blobs():
                strip = f"{self._prefix}/" if self._prefix else ""
                return [{"name": b.name[len(strip):], "size": b.size}
                        for b in self._bucket.list_blobs(prefix=search)]

            items = await asyncio.to_thread(list_blobs)
        else:
            def list_local():
                found = []
                if not os.path.isdir(self._root):
                    return found
                for dirpath, _, names in os.walk(self._root):
                    for name in names:
                        full = os.path.join(dirpath, name)
                        rel = os.path.relpath(full, self._root).replace(os.sep, "/")
                        if prefix is None or rel.startswith(prefix):
                            found.append({"name": rel, "size": os.stat(full).st_size})
                return found

            items = await asyncio.to_thread(list_local)
        return sorted(items, key=lambda item: item["name"])
