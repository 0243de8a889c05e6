"""
Download the external universal-register-machine pattern.

The notes page is HTML; the first linked .rle file (optionally filtered by
--match) is fetched. The SHA-256 is checked against --sha256, the value in
lifescope.config, or a `<file>.sha256` sidecar written on the first fetch.
"""

import logging
import re
from pathlib import Path
from urllib.parse import urljoin

import requests
from django.core.management.base import BaseCommand, CommandError

from lifescope import config
from main.cli import EXIT_USAGE
from main.manifest import sha256_bytes

logger = logging.getLogger("lifescope.cli")

_RLE_LINK = re.compile(r'href\s*=\s*["\']([^"\']+\.rle)["\']', re.IGNORECASE)
TIMEOUT = 60


def rle_links(html: str, base_url: str) -> list:
    return [urljoin(base_url, href) for href in _RLE_LINK.findall(html)]


class Command(BaseCommand):
    help = "Fetch the universal register machine RLE pattern and verify its hash."

    def add_arguments(self, parser):
        parser.add_argument("--url", default=config.URM_NOTES_URL)
        parser.add_argument("--out", default=config.URM_PATTERN_FILE)
        parser.add_argument("--match", default="", help="Substring the .rle link must contain")
        parser.add_argument("--sha256", default=config.URM_PATTERN_SHA256)

    def handle(self, *args, **opts):
        try:
            data, source = self._download(opts["url"], opts["match"])
        except requests.RequestException as exc:
            raise CommandError(f"download failed: {exc}", returncode=EXIT_USAGE) from exc

        out = Path(opts["out"])
        sidecar = out.with_name(out.name + ".sha256")
        digest = sha256_bytes(data)
        expected = opts["sha256"] or (sidecar.read_text().strip() if sidecar.exists() else None)
        if expected and digest != expected:
            raise CommandError(f"sha256 {digest} of {source} does not match {expected}",
                               returncode=EXIT_USAGE)

        out.write_bytes(data)
        if expected is None:
            sidecar.write_text(digest + "\n")
            logger.warning("no recorded hash; trusting %s and recording %s", source, digest)
        self.stdout.write(self.style.SUCCESS(f"wrote {out} ({len(data)} bytes, sha256 {digest})"))

    def _download(self, url: str, match: str) -> tuple:
        r = requests.get(url, timeout=TIMEOUT)
        r.raise_for_status()
        if "html" not in r.headers.get("Content-Type", "") and not url.lower().endswith((".htm", ".html")):
            return r.content, url
        links = [link for link in rle_links(r.text, url) if match in link]
        if not links:
            raise CommandError(f"no .rle link matching {match!r} on {url}", returncode=EXIT_USAGE)
        logger.info("following %s", links[0])
        r = requests.get(links[0], timeout=TIMEOUT)
        r.raise_for_status()
        return r.content, links[0]
