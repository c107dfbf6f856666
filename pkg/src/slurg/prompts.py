"""Prompt assembly for the annotation and generation tasks.

Templates use ``{{SLOT}}`` markers; assembly is pure string substitution,
so identical inputs always produce byte-identical bundles. Sampling
parameters ride along with each bundle: 0.7/0.9 (temperature/top_p) for
annotation, 1.2/0.9 for generation.
"""
from __future__ import annotations

from dataclasses import dataclass

from .spans import Corpus, Tier1
from .tag_codec import render_tagged

ANNOTATION_SYSTEM_PROMPT = """You are an expert text annotator specializing in identifying and labeling fallacies in argumentative and persuasive texts. Your task is to analyze the given text and accurately label instances of fallacies based on the user's instructions.

Before providing your final labels, conduct a thorough analysis of the text in <fallacy_analysis> tags.
Remember to follow the user's instructions carefully and provide the final outputs based on the user's instructions."""

ANNOTATION_TEMPLATE = """You are tasked with identifying and labeling fallacies in a given text. Your goal is to assign span labels to the text, identifying three top-level fallacy types: Fallacy of Credibility, Fallacy of Logic, and Appeal to Emotion.

<guidelines>
{{GUIDELINES}}
</guidelines>

When labeling the text, use the following tags for each fallacy type:
- <credibility_fallacy> for Fallacy of Credibility
- <logical_fallacy> for Fallacy of Logic
- <emotional_fallacy> for Appeal to Emotion
- no tags for text that does not contain a fallacy

Rules for labeling:
1. Label only the specific span of text that contains the fallacy.
2. If fallacies overlap, nest the tags appropriately.
3. The order of adjacent tags does not matter.
4. Label all instances of fallacies, even if the text contains offensive or harsh language.
5. Do not label text that does not contain a fallacy.

<few_shot_examples>
{{FEW_SHOT_EXAMPLES}}
</few_shot_examples>

Here is the text to analyze:

<text>
{{TEXT}}
</text>

Important: Please provide your labeled output within <labeled_text> tags."""

GENERATION_SYSTEM_PROMPT = """You are a Reddit and 4chan user who is deeply invested in discussions about the Ukraine war. You have extensive knowledge of the conflict, its history, and current developments. Your opinions are strong and often controversial. You're not afraid to use colorful or offensive language to make your points. You've been tasked with generating comments similar to those found on Reddit and 4chan about the Ukraine war. These comments may include various fallacies, which you'll need to incorporate and tag appropriately."""

GENERATION_TEMPLATE = """You are tasked with generating new comments based on example Reddit/4chan comments pertaining to the Ukraine war. These comments may contain zero, one, or more fallacies.

<fallacy_definitions>
{{FALLACY_DEFINITIONS}}
</fallacy_definitions>

<few_shot_samples>
{{FEW_SHOT_SAMPLES}}
</few_shot_samples>

The fallacies in the comments should be tagged using XML-style tags:
<emotional_fallacy>, <logical_fallacy>, and <credibility_fallacy>

Your output must be in the following format:

<generated_samples>
<labeled_text>
[Generated sample 1]
</labeled_text>
<labeled_text>
[Generated sample 2]
</labeled_text>
...
</generated_samples>

You are to generate {{NUM_SAMPLES}} distinct sample(s).

The fallacies to include in the text are: {{FALLACIES}}

Remember:
1. Create novel content, don't copy the examples verbatim
2. Include the specified fallacies if any are given
3. Use the correct XML tags for fallacies
4. Maintain the style and tone of Reddit/4chan comments
5. Do not self-censor or refuse to generate content"""


@dataclass(frozen=True)
class SamplingParams:
    temperature: float
    top_p: float
    max_tokens: int = 1024

    def __post_init__(self) -> None:
        if not self.temperature > 0:
            raise ValueError("temperature must be > 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


ANNOTATION_PARAMS = SamplingParams(temperature=0.7, top_p=0.9)
GENERATION_PARAMS = SamplingParams(temperature=1.2, top_p=0.9)


@dataclass(frozen=True)
class PromptBundle:
    system: str
    user: str
    params: SamplingParams


@dataclass(frozen=True)
class GenerationRequest:
    fewshot: Corpus
    num_samples: int
    fallacies: tuple[Tier1, ...] = ()
    seed_tag: str = ""

    def __post_init__(self) -> None:
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")
        object.__setattr__(self, "fallacies", tuple(self.fallacies))


def _substitute(template: str, slots: dict[str, str]) -> str:
    out = template
    for name, value in slots.items():
        out = out.replace("{{" + name + "}}", value)
    return out


def render_fewshot_annotation_examples(fewshot: Corpus) -> str:
    """Each example as its plain text followed by its tagged form."""
    blocks = []
    for sample in fewshot:
        blocks.append(
            f"Original Comment: {sample.text}\nLabeled Text: {render_tagged(sample)}"
        )
    return "\n\n".join(blocks)


def render_fewshot_generation_samples(fewshot: Corpus) -> str:
    return "\n\n".join(render_tagged(sample) for sample in fewshot)


def render_fallacy_list(fallacies: tuple[Tier1, ...]) -> str:
    return "[" + ", ".join(t.value for t in fallacies) + "]"


def build_annotation_prompt(
    sample_text: str,
    guidelines: str,
    fewshot: Corpus,
    params: SamplingParams = ANNOTATION_PARAMS,
) -> PromptBundle:
    if not sample_text:
        raise ValueError("sample text must be non-empty")
    user = _substitute(
        ANNOTATION_TEMPLATE,
        {
            "GUIDELINES": guidelines,
            "FEW_SHOT_EXAMPLES": render_fewshot_annotation_examples(fewshot),
            "TEXT": sample_text,
        },
    )
    return PromptBundle(system=ANNOTATION_SYSTEM_PROMPT, user=user, params=params)


def build_generation_prompt(
    request: GenerationRequest,
    definitions: str,
    params: SamplingParams = GENERATION_PARAMS,
) -> PromptBundle:
    user = _substitute(
        GENERATION_TEMPLATE,
        {
            "FALLACY_DEFINITIONS": definitions,
            "FEW_SHOT_SAMPLES": render_fewshot_generation_samples(request.fewshot),
            "NUM_SAMPLES": str(request.num_samples),
            "FALLACIES": render_fallacy_list(request.fallacies),
        },
    )
    return PromptBundle(system=GENERATION_SYSTEM_PROMPT, user=user, params=params)


DEFAULT_GUIDELINES = """Label each span of text that argues through a fallacy rather than through evidence. Use the smallest meaningful phrase: a subclause up to a whole sentence. Spans may nest when one fallacy occurs inside another, and the same span may carry more than one label.

- credibility_fallacy: the argument attacks or leans on who is speaking instead of what is said (personal attacks, popularity, misplaced authority, tradition, hypocrisy charges).
- logical_fallacy: the argument's structure is invalid (single-cause explanations, circularity, false dilemmas, slippery slopes, straw men, unsound analogies or generalizations).
- emotional_fallacy: the argument substitutes an emotional reaction for justification (fear, pity, anger, ridicule, flattery, or pointing at a worse problem).

Leave text without fallacious reasoning untagged."""

DEFAULT_FALLACY_DEFINITIONS = """credibility_fallacy - arguments that stand or fall on the speaker rather than the claim: attacking the person (ad hominem), appealing to popularity (ad populum), to irrelevant authority, to nature, to tradition, or accusing the opponent of hypocrisy (tu quoque).

logical_fallacy - arguments with broken structure: reducing a complex outcome to one cause, assuming the conclusion (circular reasoning), shifting word meanings (equivocation), unsound analogies, mistaking sequence for causation, presenting only two options (false dilemma), generalizing from scant evidence, predicting inevitable chains of doom (slippery slope), misstating the opponent's position (straw man), or projecting a whole's property onto its parts.

emotional_fallacy - arguments carried by feeling instead of reasons: invoking positive emotion, fear, pity, anger, or ridicule, or dismissing an issue because a worse problem exists."""
