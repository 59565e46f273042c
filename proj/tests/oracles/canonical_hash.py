"""Recomputes request cache keys from their parts: SHA-256 over the
sorted-key compact JSON of role, model id, payload and media hash."""
import base64
import hashlib
import json
import pathlib
import sys


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def media_hash(media):
    if not media:
        return None
    digests = [sha256_hex(base64.b64decode(m)) for m in media]
    if len(digests) == 1:
        return digests[0]
    return sha256_hex("".join(d + "\n" for d in digests).encode())


def cache_key(rec) -> str:
    doc = {
        "role": rec["role"],
        "model_id": rec["model_id"],
        "payload": rec["payload"],
        "media_hash": media_hash(rec["media"]),
    }
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return sha256_hex(text.encode("utf-8"))


def main(directory: str) -> int:
    lines = (pathlib.Path(directory) / "requests.jsonl").read_text(encoding="utf-8").splitlines()
    failures = 0
    for n, line in enumerate(lines, 1):
        rec = json.loads(line)
        want = cache_key(rec)
        if want != rec["cache_key"]:
            failures += 1
            print(f"FAIL line {n}: {rec['cache_key']} != {want}")
    print(f"{len(lines) - failures}/{len(lines)} cache keys match")
    return 1 if failures or not lines else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
