#!/usr/bin/env python3
"""Keyword-matching external backend.

A starting point for plugging another model into spellforge:

    spellforge forge "a huge purple storm" --backend "python3 tools/example_backend.py"

Reads one JSON request per line on stdin and answers one JSON line on stdout.
"""

import json
import math
import sys

TYPES = {
    0: ("bolt", "arrow", "missile", "dart", "projectile"),
    1: ("fireball", "fire", "flame", "explosion"),
    2: ("thunder", "lightning", "storm", "strike"),
    3: ("trap", "snare", "rune", "glyph", "pitfall"),
    4: ("aura", "field", "zone", "cloud", "area"),
}

# word -> (status index, raw value); bounds are power 5, speed 4, area 5, color 7.
STATUS_WORDS = {
    "weak": (0, 0.75), "strong": (0, 3.25), "mighty": (0, 3.75), "devastating": (0, 4.75),
    "slow": (1, 0.75), "fast": (1, 3.25), "swift": (1, 3.25),
    "small": (2, 0.75), "large": (2, 3.25), "huge": (2, 4.25),
    "red": (3, 0.2), "orange": (3, 1.2), "yellow": (3, 2.2), "white": (3, 3.2),
    "green": (3, 4.2), "cyan": (3, 5.2), "blue": (3, 6.2), "purple": (3, 6.8),
}
DEFAULT_STATUSES = [2.25, 1.75, 2.25, 3.2]

# phrase -> (row, col, value)
EFFECT_PHRASES = {
    "holds the enemy": (0, 1, -1), "roots": (0, 1, -1), "slows": (0, 1, -1),
    "burns": (0, 0, -1), "poisons": (0, 0, -1), "drains": (0, 3, -1),
    "shatters": (0, 2, -1), "heals allies": (2, 0, 1), "shields allies": (2, 2, 1),
}


def predict(prompt):
    text = prompt.lower()
    words = text.replace(",", " ").replace(".", " ").split()
    scores = [1.0] * len(TYPES)
    for t, keys in TYPES.items():
        scores[t] += 4.0 * sum(w in keys for w in words)
    total = sum(math.exp(s) for s in scores)
    probs = [math.exp(s) / total for s in scores]

    statuses = list(DEFAULT_STATUSES)
    for w in words:
        if w in STATUS_WORDS:
            k, v = STATUS_WORDS[w]
            statuses[k] = v

    effects = [[0] * 4 for _ in range(4)]
    for phrase, (r, c, v) in EFFECT_PHRASES.items():
        if phrase in text:
            effects[r][c] = v
    return {"type_probs": probs, "statuses": statuses, "effects": effects}


def main():
    for line in sys.stdin:
        try:
            req = json.loads(line)
        except json.JSONDecodeError:
            continue
        if req.get("op") == "hello":
            reply = {"op": "hello", "model_id": "keywords-1"}
        else:
            reply = predict(req.get("prompt", ""))
        sys.stdout.write(json.dumps(reply) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
