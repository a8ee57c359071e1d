"""Garment description generation.

Two backends: a deterministic template renderer, and a language-model client
that prompts with a fashion-expert system prompt plus four in-context samples
and parses ``{desc: ...}`` replies.  Unparseable replies are retried once,
then the template output is used and the fallback recorded.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from typing import Callable, Protocol

import httpx

from .hierarchy import Garment

log = logging.getLogger(__name__)

SYSTEM_PROMPT = """\
You are a fashion expert.  Describe the clothing item concisely based on
the information provided, strictly within 70 tokens.
You need to prioritize keeping the information that may influence
the appearance the most, while trying to describe the image
as informatively as possible.
Within each whole-body item, there could be sub-items, each may have
its own descriptive attributes.

Here is the structure of the clothing item information provided:
The item information is a structured dictionary including the following keys:
(1) "category": A string indicating the main item category
(e.g., "Coat", "Trousers").
(2) "top_level": A list [] of attributes that provide a general description
of the main item (e.g., ["long", "wool"]).
(3) "sub_level": A list [] of dictionaries {} where each dictionary describes
a specific part of the main item. Each dictionary contains:
- The part's name as the key (e.g., "Collar", "Pockets").
- A list [] of attributes as the value that
describes the details of that part (e.g., ["wide", "deep", "large"]).

Please provide a cohesive description of the item, incorporating all
the details provided for both the main item and its sub-items.
Ensure the description maintains clarity and preserves the hierarchical
relationship between main items and sub-items.
Refrain from giving any personal opinion.
You must reply in the format of a Python dictionary {desc: description}."""

IN_CONTEXT_SAMPLES: list[tuple[dict, str]] = [
    (
        {
            "category": "coat",
            "top_level": ["long", "wool"],
            "sub_level": [{"Collar": ["wide"]}, {"Pockets": ["deep"]}, {"Buttons": ["large"]}],
        },
        "{desc: A long wool coat with a wide collar, deep pockets and large buttons}",
    ),
    (
        {
            "category": "trousers",
            "top_level": ["slim-fit"],
            "sub_level": [{"Stitching": ["subtle"]}, {"Leg": ["tapered"]}],
        },
        "{desc: Slim-fit trousers with subtle stitching and a tapered leg}",
    ),
    ({"category": "shirt", "top_level": ["cotton"], "sub_level": []}, "{desc: A cotton shirt}"),
    ({"category": "shoe", "top_level": [], "sub_level": []}, "{desc: A pair of shoes}"),
]

# categories worn in twos: the description reads "a pair of <plural>"
PAIR_WORN = frozenset({"shoe", "boot", "sandal", "sneaker", "heel", "slipper", "glove", "sock", "mitten", "earring"})
# part names that take no article even in the singular
MASS_NOUNS = frozenset({"stitching", "embroidery", "lace", "trim", "piping", "beading", "fringe", "mesh"})


@dataclass
class DescriptionResult:
    text: str
    backend: str  # template | llm
    fallback: bool = False  # llm reply unusable; template output substituted


def garment_payload(garment: Garment) -> dict:
    """The structured dictionary a backend describes."""
    return {
        "category": garment.category,
        "top_level": list(garment.attributes),
        "sub_level": [{part.name.capitalize(): list(part.attributes)} for part in garment.parts],
    }


def _article(phrase: str) -> str:
    return "an" if phrase[:1].lower() in "aeiou" else "a"


def _noun_phrase(words: list[str], noun: str) -> str:
    noun = noun.lower()
    phrase = " ".join([*words, noun]).strip()
    if noun in PAIR_WORN:
        return f"{_article(phrase)} pair of " + " ".join([*words, noun + "s"])
    if noun.endswith("s") or noun in MASS_NOUNS or noun.endswith("ing"):
        return phrase
    return f"{_article(phrase)} {phrase}"


def _join(phrases: list[str]) -> str:
    if len(phrases) == 1:
        return phrases[0]
    return ", ".join(phrases[:-1]) + " and " + phrases[-1]


class TemplateDescriptionBackend:
    """Deterministic renderer: article + attributes + category, parts appended
    as "with <part phrases>" joined by commas and a final "and"."""

    name = "template"

    def describe(self, garment: Garment) -> DescriptionResult:
        text = _noun_phrase(list(garment.attributes), garment.category)
        if garment.parts:
            text += " with " + _join([_noun_phrase(p.attributes, p.name) for p in garment.parts])
        text = text[:1].upper() + text[1:]
        return DescriptionResult(text=text, backend=self.name)


_REPLY_RE = re.compile(r"\{\s*['\"]?desc['\"]?\s*:\s*(.*?)\}?\s*$", re.DOTALL)


def parse_reply(reply: str) -> str | None:
    match = _REPLY_RE.search(reply.strip())
    if not match:
        return None
    text = match.group(1).strip().strip("'\"").strip()
    return text or None


def build_prompt(garment: Garment) -> str:
    chunks = [SYSTEM_PROMPT, ""]
    for i, (payload, reply) in enumerate(IN_CONTEXT_SAMPLES, start=1):
        chunks += [
            f"# IN-CONTEXT SAMPLE {i}",
            "# input structure",
            json.dumps(payload, indent=4),
            "# output",
            reply,
            "",
        ]
    chunks += ["# input structure", json.dumps(garment_payload(garment), indent=4), "# output"]
    return "\n".join(chunks)


class RuleBasedClient:
    """Offline stand-in for a hosted language model: replies in the expected
    ``{desc: ...}`` shape using the template grammar."""

    def __call__(self, prompt: str) -> str:
        payload = json.loads(prompt[prompt.rindex("# input structure") :].split("\n", 1)[1].rsplit("# output", 1)[0])
        garment = Garment(
            category=payload["category"],
            attributes=payload["top_level"],
        )
        from .hierarchy import GarmentPart

        for entry in payload["sub_level"]:
            for name, attrs in entry.items():
                garment.parts.append(GarmentPart(name, attrs))
        return "{desc: " + TemplateDescriptionBackend().describe(garment).text + "}"


class HttpLlmClient:
    """Minimal JSON-over-HTTP completion client: POST {"prompt": ...} and read
    the reply from the "text" field."""

    def __init__(self, endpoint: str, timeout: float = 30.0, retries: int = 2):
        self.endpoint = endpoint
        self.timeout = timeout
        self.retries = retries

    def __call__(self, prompt: str) -> str:
        last: Exception | None = None
        for _ in range(self.retries):
            try:
                resp = httpx.post(self.endpoint, json={"prompt": prompt}, timeout=self.timeout)
                resp.raise_for_status()
                return resp.json()["text"]
            except Exception as exc:  # noqa: BLE001 - report last transport error
                last = exc
        raise RuntimeError(f"completion request failed after {self.retries} attempts: {last}")


class LlmDescriptionBackend:
    name = "llm"

    def __init__(self, client: Callable[[str], str], retries: int = 1):
        self.client = client
        self.retries = retries
        self.template = TemplateDescriptionBackend()

    def describe(self, garment: Garment) -> DescriptionResult:
        prompt = build_prompt(garment)
        log.debug("description prompt for %s:\n%s", garment.category, prompt)
        for _ in range(1 + self.retries):
            try:
                reply = self.client(prompt)
            except Exception as exc:  # noqa: BLE001 - client errors trigger the fallback
                log.warning("description client error for %r: %s", garment.category, exc)
                continue
            text = parse_reply(reply)
            if text:
                return DescriptionResult(text=text, backend=self.name)
            log.warning("unparseable description reply for %r: %.80r", garment.category, reply)
        fallback = self.template.describe(garment)
        return DescriptionResult(text=fallback.text, backend=self.name, fallback=True)


class DescriptionBackend(Protocol):
    name: str

    def describe(self, garment: Garment) -> DescriptionResult: ...
