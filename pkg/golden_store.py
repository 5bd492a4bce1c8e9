"""
Golden Store
============
Canonical tables on disk. Fresh output compared line by line.
"""

import hashlib
import json
import logging
import os
from typing import Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)


class GoldenStore:
    def __init__(self, golden_dir: str = "golden"):
        """Initialize the golden file store

        Args:
            golden_dir: Directory holding one JSON file per key
        """
        self.golden_dir = golden_dir

        if not os.path.exists(self.golden_dir):
            os.makedirs(self.golden_dir)

    def _get_golden_path(self, key: str) -> str:
        """Get the file path for a golden key"""
        safe_key = hashlib.md5(key.encode()).hexdigest()[:10]
        readable = ''.join(ch if ch.isalnum() or ch in '-_' else '_' for ch in key)
        return os.path.join(self.golden_dir, f"{readable}_{safe_key}.json")

    def get(self, key: str) -> Optional[Dict]:
        """Stored data for a key, or None"""
        path = self._get_golden_path(key)
        if not os.path.exists(path):
            return None
        try:
            with open(path, 'r') as f:
                return json.load(f).get('data')
        except (OSError, json.JSONDecodeError) as e:
            logger.warning("unreadable golden file %s: %s", path, e)
            return None

    def set(self, key: str, data) -> bool:
        """Write data under a key"""
        path = self._get_golden_path(key)
        try:
            with open(path, 'w') as f:
                json.dump({'key': key, 'data': data}, f, indent=2, sort_keys=True)
                f.write('\n')
            return True
        except OSError as e:
            logger.error("cannot write golden file %s: %s", path, e)
            return False

    def compare(self, key: str, data) -> Tuple[str, List[str]]:
        """'written' on first run, then 'match' or 'mismatch' with differing lines"""
        stored = self.get(key)
        if stored is None:
            self.set(key, data)
            return 'written', []
        fresh = json.loads(json.dumps(data))
        if stored == fresh:
            return 'match', []
        old_lines = json.dumps(stored, indent=2, sort_keys=True).splitlines()
        new_lines = json.dumps(fresh, indent=2, sort_keys=True).splitlines()
        diffs = [f"- {a}\n+ {b}" for a, b in zip(old_lines, new_lines) if a != b]
        if len(old_lines) != len(new_lines):
            diffs.append(f"line count {len(old_lines)} -> {len(new_lines)}")
        return 'mismatch', diffs
