"""Completion backends: a deterministic offline mock and a remote client.

The mock is the test oracle for the whole pipeline.  It derives its
answer purely from the prompt text: feedback examples win over fixture
examples, which win over a rule-based synthesis, so recorded user
corrections change its behavior exactly the way few-shot prompting is
supposed to steer a hosted model.
"""

from __future__ import annotations

import json
import os
import re
from typing import Optional, Protocol

import httpx

from .prompts import (
    SECTION_CLARIFY,
    SECTION_CORRECTION,
    SECTION_EXAMPLES,
    SECTION_FEEDBACK,
    SECTION_INPUT,
    SECTION_TASK,
)

API_KEY_ENV = "CHAT_MODELING_API_KEY"


class BackendUnavailable(Exception):
    pass


class CompletionBackend(Protocol):
    name: str

    def complete(self, prompt: str) -> str:  # pragma: no cover - protocol
        ...


# --- prompt introspection ----------------------------------------------------

_SECTION_RE = re.compile(r"^## ", re.MULTILINE)


def _section(prompt: str, header: str) -> Optional[str]:
    start = prompt.find(header)
    if start == -1:
        return None
    body_start = start + len(header)
    nxt = _SECTION_RE.search(prompt, body_start)
    body = prompt[body_start: nxt.start() if nxt else len(prompt)]
    return body.strip("\n")


def _example_pairs(section_text: Optional[str]) -> list[tuple[str, str]]:
    if not section_text:
        return []
    pairs = re.findall(r"Input: (.*?)\nOutput: (.*?)(?=\n\nInput: |\Z)",
                       section_text, re.DOTALL)
    return [(i.strip(), o.strip()) for i, o in pairs]


def parse_prompt(prompt: str) -> dict:
    """Split a built prompt back into its sections (used by the mock)."""
    m = re.search(re.escape(SECTION_TASK) + r" (\w+)", prompt)
    payload = _section(prompt, SECTION_INPUT + "\n") or ""
    # The payload section may be followed by a correction or clarify appendix.
    for marker in (SECTION_CORRECTION, SECTION_CLARIFY):
        cut = payload.find(marker)
        if cut != -1:
            payload = payload[:cut]
    return {
        "operation": m.group(1) if m else "",
        "examples": _example_pairs(_section(prompt, SECTION_EXAMPLES + "\n")),
        "feedback": _example_pairs(_section(prompt, SECTION_FEEDBACK + "\n")),
        "payload": payload.strip(),
    }


# --- the deterministic mock ----------------------------------------------------

# Rule-extraction keyword table, first match wins.
_EXTRACTION_TABLE = [
    ("fill", [r"\boccup(?:y|ies|ied|ying)\b", r"\bfill", r"\binside\b",
              r"\buniformly\s+on\b"]),
    ("connection", [r"\bcurves?\b", r"\bconnect", r"\blinkers?\b",
                    r"\bbetween\b.*\band\b"]),
    ("parent-child (relative)", [r"\brelative\s+to\s+(?:the\s+)?vert",
                                 r"\bat\s+vert(?:ex|ices)\b"]),
    ("siblings-parent", [r"\bnext\s+to\s+each\s+other\s+on\s+the\s+skeleton\b",
                         r"\baround\b.*\bconstrained\b"]),
    ("siblings", [r"\bnext\s+to\b", r"\bcopies\s+of\b", r"\brepeat",
                  r"\btransform\s+between\b"]),
    ("parent-child (distance)", [r"\bdistance\b", r"\babove\b", r"\bbelow\b",
                                 r"\bon\s+the\s+surface\b"]),
]

_COLOR_WORDS = ("red|green|blue|yellow|orange|purple|cyan|magenta|white|black"
                "|gray|brown|pink|lime|navy|gold")

_SKELETON_WORDS = r"box|rectangle|sphere|membrane|capsid|vesicle"

_CREATION_VERBS = ("add", "create", "generate", "build", "draw", "scatter",
                   "fill", "connect", "attach", "place")
_EDIT_VERBS = ("set", "use", "adjust", "change", "disable", "enable",
               "increase", "decrease", "tweak", "align", "make it")


def _singular(word: str) -> str:
    return word[:-1] if len(word) > 3 and word.endswith("s") else word


def _synthesize_intent(text: str) -> str:
    """Deterministic sentence-to-intent cascade (documented mock behavior):

    - creation verbs at the start produce createRule with the sentence;
    - "populate" produces editRule when immediately followed by a count,
      otherwise createRule (counts are treated as parameter tuning);
    - edit verbs at the start produce editRule;
    - selections, pivot/position updates, and visual intents are extracted
      by pattern wherever they appear.
    """
    lower = text.lower().strip()
    out: dict = {}
    ingredients: list[str] = []
    skeletons: list[str] = []

    def remember(names, bucket):
        for n in names:
            if n and n not in bucket:
                bucket.append(n)

    # selections
    m = re.search(r"\b([\w-]+)\s+skeleton\b", text, re.IGNORECASE)
    if m and m.group(1).lower() not in ("the", "a", "an", "this", "that"):
        remember([m.group(1)], skeletons)
    else:
        m = re.search(r"\b(?:into|inside|in|within|onto|on|above|below|over|under"
                      r"|around|beneath)\s+(?:the|a|an)?\s*"
                      rf"({_SKELETON_WORDS})\b", lower)
        if m:
            remember([m.group(1)], skeletons)

    m = re.search(r"\bthe\s+([\w-]+)\s+atoms?\b", text, re.IGNORECASE)
    if m:
        remember([m.group(1)], ingredients)
    m = re.search(r"\bthe\s+([\w-]+)\s+layer\b", text, re.IGNORECASE)
    if m:
        remember([m.group(1)], ingredients)
    m = re.search(r"\bconnect(?:ing|ors?)?\b[^.]*?\b([\w-]+)\s+and\s+([\w-]+)",
                  text, re.IGNORECASE)
    if not m:
        m = re.search(r"\blinkers?\s+between\s+([\w-]+)\s+and\s+([\w-]+)",
                      text, re.IGNORECASE)
    if m:
        remember([m.group(1), m.group(2)], ingredients)
    m = re.search(r"\b(?:add|populate|place|scatter)\s+(?:the\s+)?([A-Za-z][\w-]+)\b",
                  text, re.IGNORECASE)
    if m and m.group(1).lower() not in ("more", "some", "them", "it", "a", "an",
                                        "the", "elements", "instances"):
        remember([m.group(1)], ingredients)
    m = re.search(r"\bselect\s+(?:the\s+)?([A-Za-z][\w-]+)\b(?!\s+skeleton)",
                  text, re.IGNORECASE)
    if m and m.group(1).lower() not in ("a", "an", "the"):
        remember([m.group(1)], ingredients)
    m = re.search(r"\bpivot(?:\s+point)?\s+of\s+([A-Za-z][\w-]+)", text, re.IGNORECASE)
    if m:
        remember([m.group(1)], ingredients)

    # visual and bookkeeping intents
    if re.search(r"\bsave\b[^.]*\bmodel\b", lower):
        out["saveModel"] = True
    if re.search(r"\b(?:load|open)\b[^.]*\bmodel\b", lower):
        out["loadModel"] = True
    if re.search(r"\b(?:show|add|enable|draw)\b[^.]*\blabels?\b", lower):
        out["labeling"] = True
    if re.search(r"\b(?:hide|remove|disable)\b[^.]*\blabels?\b", lower):
        out["labeling"] = False
    m = re.search(r"\b(protein|chain|atomistic|residue|amino acid)\s+(?:level|mode)\b",
                  lower)
    if not m:
        m = re.search(r"\b(?:switch|change)\s+(?:the\s+)?(?:mode\s+)?to\s+"
                      r"(protein|chain|atomistic|residue|amino acid)\b", lower)
    if m:
        out["changeMode"] = m.group(1)
    m = re.search(rf"\b(?:make|color|paint)\s+(?:the\s+)?([\w-]+)\s+({_COLOR_WORDS})\b",
                  lower)
    if m:
        name = _singular(m.group(1))
        out["modifyColor"] = [{"ingredient": name, "color": m.group(2)}]
    if "highlight" in lower:
        m = re.search(r"\bhighlight\s+(?:the\s+)?([\w-]+)\b", lower)
        target = None
        if m and m.group(1) not in ("them", "it"):
            target = _singular(m.group(1))
        elif out.get("modifyColor"):
            target = out["modifyColor"][0]["ingredient"]
        if target:
            out["highlightIngredient"] = [{"ingredient": target}]

    m = re.search(r"\bchain\s+(\d+)\b[^.]*?\bresidue\s+(\d+)\b", lower)
    reversed_pivot = re.search(r"\bresidue\s+(\d+)\b[^.]*?\bchain\s+(\d+)\b", lower)
    if "pivot" in lower and (m or reversed_pivot):
        if m:
            out["updatePivot"] = {"chainId": int(m.group(1)), "residueId": int(m.group(2))}
        else:
            out["updatePivot"] = {"chainId": int(reversed_pivot.group(2)),
                                  "residueId": int(reversed_pivot.group(1))}
    m = re.search(r"\bsnap\s+([\w-]+)\s+chain\s+(\d+)\s+residue\s+(\d+)\s+to\s+"
                  r"([\w-]+)\s+chain\s+(\d+)\s+residue\s+(\d+)", text, re.IGNORECASE)
    if m:
        out["updatePosition"] = [
            {"mainIngredient": m.group(4), "chainId": int(m.group(5)),
             "residueId": int(m.group(6))},
            {"subIngredient": m.group(1), "chainId": int(m.group(2)),
             "residueId": int(m.group(3))},
        ]

    # rule creation vs parameter editing
    first_word = re.match(r"[a-z]+", lower)
    first = first_word.group(0) if first_word else ""
    is_creation = first in _CREATION_VERBS
    is_edit = first in _EDIT_VERBS or lower.startswith("i would") or lower.startswith("no ")
    if first == "populate":
        after = lower[len("populate"):].strip()
        if re.match(r"\d", after):
            is_edit = True
        else:
            is_creation = True
    if re.search(r"\bcollision\b", lower) and not is_creation:
        is_edit = True

    if is_creation:
        out["createRule"] = text.strip()
    elif is_edit:
        out["editRule"] = text.strip()

    if ingredients:
        out["selectIngredient"] = [{"ingredient": n} for n in ingredients]
    if skeletons:
        out["selectSkeleton"] = [{"skeleton": n} for n in skeletons]

    if not out:
        # Nothing recognized: surface the sentence as a rule description so
        # the downstream pipeline (and its error reporting) stays in charge.
        out["createRule"] = text.strip()

    ordered_keys = ["selectIngredient", "selectSkeleton", "createRule", "editRule",
                    "saveModel", "loadModel", "updatePivot", "updatePosition",
                    "highlightIngredient", "modifyColor", "changeMode", "labeling"]
    return json.dumps({k: out[k] for k in ordered_keys if k in out})


def _synthesize_patch(text: str) -> str:
    lower = text.lower()
    out: dict = {}
    m = re.search(r"\bpopulate\s+(\d+)\b", lower)
    if m:
        out["elements"] = int(m.group(1))
        if re.search(r"\bon\s+the\s+skeleton(?:\s+surface)?\b", lower):
            out["distance"] = 0.0
    m = re.search(r"\b(?:number\s+of\s+)?elements?\s+(?:to|=)\s+(\d+)\b", lower)
    if m:
        out["elements"] = int(m.group(1))
    m = re.search(r"\buse\s+(\d+)\s+(?:balls?|elements?|atoms?|instances?|copies)\b", lower)
    if m:
        out["elements"] = int(m.group(1))
    m = re.search(r"\b(\d+)\s+(?:balls?|copies)\b", lower)
    if m and "elements" not in out:
        out["elements"] = int(m.group(1))
    m = re.search(r"\boccupy\s+(\d+)\s*%", lower)
    if m:
        out["space"] = int(m.group(1))
    m = re.search(r"\bdistance\s+(?:to|of|at|=)?\s*(\d+(?:\.\d+)?)\b", lower)
    if not m:
        m = re.search(r"\b(\d+(?:\.\d+)?)\s+units?\s+(?:above|below|away)\b", lower)
    if m:
        out["distance"] = float(m.group(1))
    m = re.search(r"\b(?:std|standard\s+deviation)\s+(?:of|to|=)?\s*(\d+(?:\.\d+)?)\b",
                  lower)
    if m:
        out["std"] = float(m.group(1))
    m = re.search(r"\blength\s+(?:of|to|=)?\s*(\d+(?:\.\d+)?)\b", lower)
    if m:
        out["length"] = float(m.group(1))
    if re.search(r"\b(?:no|without|disable[d]?)\b[^.]*\bcollision", lower):
        out["collisionDetection"] = False
    elif re.search(r"\b(?:enable[d]?|with|turn\s+on)\b[^.]*\bcollision", lower):
        out["collisionDetection"] = True
    if re.search(r"\b(?:inverse|opposite|inward)\b[^.]*\bnormal\b", lower):
        out["alignDirection"] = "inverse-normal"
    elif re.search(r"\balign\b[^.]*\bnormal\b", lower):
        out["alignDirection"] = "normal"
    if re.search(r"\bstraight\b", lower):
        out["curve"] = "straight"
    elif re.search(r"\bcatmull", lower):
        out["curve"] = "CatmullRom"
    m = re.search(r"\btweak(?:ing)?\b[^.]*?(\d+(?:\.\d+)?)\s*degrees?", lower)
    if m:
        out["tweaking"] = f"tweak up to {m.group(1)} degrees"
    return json.dumps(out)


def _classify_rule(text: str) -> Optional[str]:
    lower = text.lower()
    for label, patterns in _EXTRACTION_TABLE:
        for pattern in patterns:
            if re.search(pattern, lower):
                return label
    return None


class MockBackend:
    """Offline, deterministic completion source; same prompt, same output."""

    name = "mock"

    def complete(self, prompt: str) -> str:
        parsed = parse_prompt(prompt)
        payload = parsed["payload"]
        # Feedback examples dominate (most recent first), then fixtures.
        for inp, outp in reversed(parsed["feedback"]):
            if inp == payload:
                return outp
        for inp, outp in parsed["examples"]:
            if inp == payload:
                return outp
        operation = parsed["operation"]
        if operation == "code_generation":
            return _synthesize_intent(payload)
        if operation == "parameter_adjustment":
            return _synthesize_patch(payload)
        if operation == "rule_extraction":
            return _classify_rule(payload) or "unknown"
        if operation == "rule_sequence":
            if "blood plasma" in payload.lower():
                from .prompts import blood_plasma_sequence
                return blood_plasma_sequence()
            return ""
        if operation == "advisor":
            return ("Model the space-defining structures first, then populate finer "
                    "components, and leave connective elements for last.\n"
                    f"Question: {payload}")
        return ""


class RemoteBackend:
    """OpenAI-compatible chat-completions client.

    Single completion, temperature 0, 60 s timeout, no streaming; the API
    key comes from the CHAT_MODELING_API_KEY environment variable.  A
    custom httpx.Client can be injected for testing.
    """

    name = "remote"

    def __init__(self, endpoint: str, model: str, timeout: float = 60.0,
                 client: Optional[httpx.Client] = None):
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout
        self._client = client

    def complete(self, prompt: str) -> str:
        api_key = os.environ.get(API_KEY_ENV, "")
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
            "n": 1,
            "stream": False,
        }
        try:
            if self._client is not None:
                response = self._client.post(self.endpoint, json=body,
                                             headers=headers, timeout=self.timeout)
            else:
                response = httpx.post(self.endpoint, json=body, headers=headers,
                                      timeout=self.timeout)
            response.raise_for_status()
            data = response.json()
            return data["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise BackendUnavailable(f"completion request failed: {exc}") from exc
