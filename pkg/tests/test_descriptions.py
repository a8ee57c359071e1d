"""Garment description backends: template grammar, prompting, reply parsing."""

import json

import pytest

from lots.sketchy.descriptions import (
    IN_CONTEXT_SAMPLES,
    SYSTEM_PROMPT,
    LlmDescriptionBackend,
    RuleBasedClient,
    TemplateDescriptionBackend,
    build_prompt,
    garment_payload,
    parse_reply,
)
from lots.sketchy.hierarchy import Garment, GarmentPart


def coat():
    return Garment(
        category="coat",
        attributes=["long", "wool"],
        parts=[GarmentPart("collar", ["wide"]), GarmentPart("pockets", ["deep"]), GarmentPart("buttons", ["large"])],
    )


def test_template_renders_attributed_garment_with_parts():
    out = TemplateDescriptionBackend().describe(coat())
    assert out.text == "A long wool coat with a wide collar, deep pockets and large buttons"
    assert out.backend == "template"
    assert not out.fallback


def test_template_renders_plural_and_mass_noun_parts():
    trousers = Garment(
        category="trousers",
        attributes=["slim-fit"],
        parts=[GarmentPart("stitching", ["subtle"]), GarmentPart("leg", ["tapered"])],
    )
    assert TemplateDescriptionBackend().describe(trousers).text == (
        "Slim-fit trousers with subtle stitching and a tapered leg"
    )


def test_template_renders_single_attribute_item():
    shirt = Garment(category="shirt", attributes=["cotton"])
    assert TemplateDescriptionBackend().describe(shirt).text == "A cotton shirt"


def test_template_renders_pair_worn_item():
    shoe = Garment(category="shoe", attributes=[])
    assert TemplateDescriptionBackend().describe(shoe).text == "A pair of shoes"


def test_template_handles_vowel_onset_and_two_parts():
    vest = Garment(category="vest", attributes=["orange"], parts=[GarmentPart("zipper", ["metal"])])
    assert TemplateDescriptionBackend().describe(vest).text == "An orange vest with a metal zipper"


def test_template_matches_every_in_context_sample():
    backend = TemplateDescriptionBackend()
    for payload, reply in IN_CONTEXT_SAMPLES:
        garment = Garment(category=payload["category"], attributes=list(payload["top_level"]))
        for entry in payload["sub_level"]:
            for name, attrs in entry.items():
                garment.parts.append(GarmentPart(name.lower(), list(attrs)))
        assert "{desc: " + backend.describe(garment).text + "}" == reply


def test_payload_mirrors_hierarchy_structure():
    payload = garment_payload(coat())
    assert payload["category"] == "coat"
    assert payload["top_level"] == ["long", "wool"]
    assert payload["sub_level"][0] == {"Collar": ["wide"]}
    json.dumps(payload)  # must be serializable as-is


def test_parse_reply_accepts_common_shapes():
    assert parse_reply("{desc: A cotton shirt}") == "A cotton shirt"
    assert parse_reply("{'desc': 'A cotton shirt'}") == "A cotton shirt"
    assert parse_reply('{"desc": "A cotton shirt"}') == "A cotton shirt"
    assert parse_reply("  {desc: A cotton shirt}  \n") == "A cotton shirt"
    assert parse_reply("{desc: A long coat\nwith pockets}") == "A long coat\nwith pockets"


def test_parse_reply_rejects_garbage():
    assert parse_reply("A cotton shirt") is None
    assert parse_reply("{desc: }") is None
    assert parse_reply("") is None


def test_prompt_carries_system_text_samples_and_payload():
    prompt = build_prompt(coat())
    assert prompt.startswith(SYSTEM_PROMPT)
    assert SYSTEM_PROMPT.startswith("You are a fashion expert.")
    assert "reply in the format of a Python dictionary {desc: description}" in SYSTEM_PROMPT
    for i in range(1, 5):
        assert f"# IN-CONTEXT SAMPLE {i}" in prompt
    for _, reply in IN_CONTEXT_SAMPLES:
        assert reply in prompt
    assert prompt.rstrip().endswith("# output")
    tail = prompt[prompt.rindex("# input structure") :]
    assert '"category": "coat"' in tail


def test_rule_based_client_round_trips_through_prompt():
    backend = LlmDescriptionBackend(RuleBasedClient())
    out = backend.describe(coat())
    assert out.text == "A long wool coat with a wide collar, deep pockets and large buttons"
    assert out.backend == "llm"
    assert not out.fallback


def test_unparseable_reply_retries_then_falls_back():
    calls = []

    def flaky(prompt):
        calls.append(prompt)
        return "no dictionary here"

    backend = LlmDescriptionBackend(flaky, retries=1)
    out = backend.describe(coat())
    assert len(calls) == 2  # first try + one retry
    assert out.fallback
    assert out.backend == "llm"
    assert out.text == "A long wool coat with a wide collar, deep pockets and large buttons"


def test_reply_good_on_retry_avoids_fallback():
    replies = iter(["garbage", "{desc: A custom description}"])

    def client(prompt):
        return next(replies)

    out = LlmDescriptionBackend(client, retries=1).describe(coat())
    assert out.text == "A custom description"
    assert not out.fallback


def test_client_exception_counts_as_failed_attempt():
    def broken(prompt):
        raise ConnectionError("endpoint down")

    out = LlmDescriptionBackend(broken, retries=1).describe(coat())
    assert out.fallback
    assert out.text.startswith("A long wool coat")
