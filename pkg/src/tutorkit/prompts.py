"""Prompt templates shared by the dataset builders and the tutoring engine.

Every template is byte-deterministic given its inputs: same context, content,
act, and exemplar always produce the same prompt string.
"""
from __future__ import annotations

from typing import Optional

from .acts import TUTOR, Taxonomy

ACT_PREDICTION_INSTRUCTION = (
    "Select an appropriate next tutor act based on the given 'dialogue context' and "
    "'act candidates'. In the context, tutor uses various tutor act and contents"
    "(activities or passages), depending on the student's abilities and questions. "
    "Tutor act represents a teaching method that you can exploit. Choose the best act "
    "catering to the context and understanding the meaning of each act."
)

UTTERANCE_GENERATION_INSTRUCTION = (
    "As an English tutor for a Korean student, your job is to create coherent and "
    "tailored responses based on the given 'dialogue context' and 'tutor's act'. "
    "In the context, tutor uses various teaching acts and contents(activities or "
    "passages), depending on the student's abilities and questions. The given action "
    "is a teaching method that you have to exploit."
)

MISSING_CONTEXT_INSTRUCTION = (
    "Predict a speaker and their utterance to fit between the given 'dialogue context' "
    "of a student and a teacher and the final 'utterance' made by the teacher."
)

MINORITY_ACT_INSTRUCTION = (
    "As an English teacher for Korean students, generate tutor's utterance to teach "
    "the given learning content with the act."
)

ACT_RETRY_NOTE = (
    "Your previous reply did not contain a registered act id. Reply with exactly one "
    "act id chosen from the act candidates list, e.g. t.teach.direct_answer."
)


def act_candidates_block(taxonomy: Taxonomy) -> str:
    """All tutor acts with their descriptions, one per line, canonical order."""
    return "\n".join(f"{d.id}, {d.description}" for d in taxonomy.acts_by(TUTOR))


def act_selection_prompt(context: str, content: str, taxonomy: Taxonomy) -> str:
    return (
        f"{ACT_PREDICTION_INSTRUCTION}\n\n"
        f"- Context: {context},\n"
        f"- Content: {content},\n"
        f"- Act candidates:\n{act_candidates_block(taxonomy)}"
    )


def generation_task_block(context: str, content: str, act: str, description: str) -> str:
    return (
        f"- Context: {context},\n"
        f"- Content: {content},\n"
        f"- Act: {act}, {description}"
    )


def generation_prompt(
    context: str,
    content: str,
    act: str,
    description: str,
    exemplar_block: Optional[str] = None,
) -> str:
    task = generation_task_block(context, content, act, description)
    if exemplar_block is None:
        return f"{UTTERANCE_GENERATION_INSTRUCTION}\n\n{task}"
    return (
        f"{UTTERANCE_GENERATION_INSTRUCTION}\n\n"
        f"Here is an example scenario with the same tutor act:\n"
        f"{exemplar_block}\n\n"
        f"Now respond to the task scenario.\n{task}"
    )


def exemplar_block(context: str, content: str, act: str, description: str, utterance: str) -> str:
    return f"{generation_task_block(context, content, act, description)}\n- Response: {utterance}"


BASELINE_PREAMBLE = """\
You are an English tutor tasked with teaching a Korean ESL student named {student}.
Your role includes creating tutor responses, aiming to cater to the student's needs and the tutoring dialogue context.

[Process] Generate a tutor utterance that:
    - Fits the current dialogue context and the learning content being discussed.
    - Utilizes the most effective one teaching strategy to ensure optimal student engagement and understanding.
    - Introduces new learning content as necessary, maintaining the continuity and effectiveness of the session.
    - Focuses on educating the student on the provided learning content, aiding their comprehension and mastery.

[Language Note] Although you will primarily teach in Korean, the prompt and its instructions are in English for clarity.

[Task Scenario]
Next, I will provide the task scenario in terms of learning content, followed by the context.

[1] Dialogue Context:
{context}

[2] Learning Content:
{content}

[Your Task]
Generate an utterance appropriate for the given dialogue context right after it is presented during the tutoring session. This should effectively teach the learning content in relation to the context.\
"""


def baseline_prompt(context: str, content: str, student_name: str = "<user>") -> str:
    return BASELINE_PREAMBLE.format(student=student_name, context=context, content=content)
