#!/usr/bin/env python3
"""Generate the bundled synthetic fixture corpus (deterministic).

Writes tests/data/fixture_corpus.txt (4 sessions, every act of the bundled
vocabulary, content tags, all three correctness levels) and
tests/data/expert_minority.jsonl (expert rows for the minority-act dataset).
Run from the repository root; the output files are committed.
"""
from __future__ import annotations

import json
import os
import random
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from tutorkit.acts import load_taxonomy_file
from tutorkit.corpus import corpus_stats
from tutorkit.transcript import parse_corpus_text

WORDS = [
    ("introspective", "자아성찰하는", "a therapist can help you navigate these issues in an introspective way"),
    ("draining", "진이 빠지는", "if you have been ghosted it can be very draining"),
    ("inadvertently", "의도치 않게", "she inadvertently deleted the message"),
    ("telltale", "숨길 수 없는", "the telltale signs of stress were easy to spot"),
    ("innermost", "가장 깊은", "sharing their innermost thoughts and feelings"),
    ("navigate", "잘 헤쳐나가다", "a mentor can help you navigate the process"),
    ("withdraw", "물러나다", "he began to withdraw socially after the move"),
    ("vent", "터뜨리다", "sometimes you just need to vent your frustration"),
    ("resilient", "회복력 있는", "children are often more resilient than adults"),
    ("ambiguous", "모호한", "the ending of the story is deliberately ambiguous"),
    ("snub", "무시하다", "she felt snubbed when nobody replied"),
    ("cringey", "민망한", "the speech was a little cringey but heartfelt"),
]

# Teaching move per act family; {w}=word, {m}=meaning, {i}=segment number.
TEACH_TEMPLATES = {
    "t.teach.direct_answer": '맞아요. "{w}"는 "{m}"라는 뜻입니다. ({i})',
    "t.teach.repair": '조금 정정이 필요해요. "{w}"는 "{m}"라고 해야 맞습니다. ({i})',
    "t.teach.emphasis": '"{w}"가 핵심이에요. "{m}"라는 뜻, 꼭 기억해 두세요. ({i})',
    "t.teach.review": '지난번에 본 "{w}" 기억나시나요? "{m}"였죠. 한 번 더 정리할게요. ({i})',
    "t.teach.method.definition": '"{w}"의 정의는 "{m}"입니다. ({i})',
    "t.teach.method.vocab_expression.word_usage": '"{w}"는 주로 이런 상황에서 써요. 격식 있는 자리에서도 자연스러운 표현이에요. ({i})',
    "t.teach.method.vocab_expression.context": '문장 속에서 보면 "{w}"의 뜻이 더 분명해져요. 지문의 흐름상 "{m}"라는 의미죠. ({i})',
    "t.teach.method.vocab_expression.etymology": '"{w}"의 어원을 볼까요. 앞부분은 안쪽을, 뒷부분은 본다는 뜻이라서 "{m}"가 됩니다. ({i})',
    "t.teach.method.vocab_expression.relevant": '"{w}"와 비슷한 계열의 단어들을 같이 외우면 좋아요. ({i})',
    "t.teach.method.vocab_expression.examples": '예문으로 볼게요. "I felt completely {w} after the exam." 이런 식으로 씁니다. ({i})',
    "t.teach.method.vocab_expression.synonyms": '"{w}"의 유의어로는 어떤 게 있을까요? "{m}"와 비슷한 말들이죠. ({i})',
    "t.teach.method.vocab_expression.antonyms": '"{w}"의 반대말을 생각해 보면 뜻이 선명해져요. ({i})',
    "t.teach.method.vocab_expression.code_switching": '한국어로 "{m}", in English we say "{w}". 양쪽을 같이 기억하세요. ({i})',
    "t.teach.method.grammar.rule": '여기서 수동태를 쓰는 이유는 행위자보다 상태가 중요하기 때문이에요. "{w}" 형태를 보세요. ({i})',
    "t.teach.method.grammar.examples": '문법 예문 하나 볼게요. "She was {w} by the news." 구조가 보이시나요? ({i})',
    "t.teach.method.inferential_clue": '힌트를 드릴게요. 문장 뒤쪽의 "{m}"라는 단서를 보면 "{w}"의 뜻을 추측할 수 있어요. ({i})',
    "t.teach.method.translation": '이 문장을 번역하면 "그는 {m} 태도로 대답했다" 정도가 됩니다. ({i})',
    "t.teach.method.pronunciation": '"{w}" 발음을 해볼게요. 강세가 두 번째 음절에 있어요. ({i})',
    "t.teach.method.background_knowledge": '문화적인 배경을 알면 좋아요. 영어권에서 "{w}"는 관계 맥락에서 자주 쓰이는 말이에요. ({i})',
    "t.teach.request.practice": '"{w}"를 활용해서 자신의 경험으로 한 문장을 만들어 볼까요? ({i})',
    "t.teach.request.self_correction": '어? "{w}"라고 하셨나요? 다시 한 번 말해 보실래요? ({i})',
    "t.teach.request.read_aloud": '그럼 이 문장을 소리 내어 읽어봐 주세요. "{w}"가 들어간 세 번째 줄이요. ({i})',
}

ENGAGE_ACTS = ["t.engage.encourage", "t.engage.empathize", "t.engage.personalize", "t.engage.humor"]
ENGAGE_TEXTS = {
    "t.engage.encourage": "너무 좋아요. 정확하게 보셨어요.",
    "t.engage.empathize": "이 부분은 원래 헷갈리기 쉬워요. 천천히 가도 됩니다.",
    "t.engage.personalize": "지난번에 여행 이야기 하셨죠? 그 상황에서도 쓸 수 있는 표현이에요.",
    "t.engage.humor": "이 단어만 나오면 저도 커피가 필요해져요.",
}

STUDENT_FOLLOWUPS = [
    ("s.question.direct_question", None, "이 단어는 다른 뜻도 있나요? ({i})"),
    ("s.answer.affirmation", None, "네, 이해했습니다. ({i})"),
    ("s.question.confirmation_question", None, "제가 이해한 게 맞나요? ({i})"),
    ("s.operational.positive_feedback", None, "이렇게 설명해 주시니까 도움이 돼요. ({i})"),
    ("s.answer.rationale", "high", "문맥에 단서가 있어서 그렇게 생각했어요. ({i})"),
    ("s.operational.clarification_question", None, "방금 어떤 문장을 말씀하신 거죠? ({i})"),
    ("s.operational.negative_feedback", None, "조금 빠른 것 같아요. 다시 한 번 설명해 주세요. ({i})"),
    ("s.general", None, "아 그렇군요. ({i})"),
]


def session_doc(session_id: str, tutor_id: str, student_id: str, seed: int, segment_base: int) -> str:
    rng = random.Random(seed)
    teaching_acts = sorted(TEACH_TEMPLATES)
    rng.shuffle(teaching_acts)

    day = segment_base // 100
    lines = [f"=== session {session_id} tutor={tutor_id} student={student_id} ==="]
    lines.append(
        f"tutor: [Syllabus-{day}][Day {day}: vocabulary and reading comprehension over the ghosting article]"
        f"[t.general]안녕하세요, {day}일차 수업 시작해 볼까요?"
    )
    lines.append(f"student: [s.general]안녕하세요, 선생님. ({day}일차)")
    lines.append(
        f"tutor: [t.operational.agenda]오늘은 {day}일차 지문 어휘를 중심으로 볼게요."
        f"[t.operational.check_readiness]자료 {day}쪽이 화면에 보이시나요?"
    )
    lines.append(f"student: [s.general]네, {day}쪽 잘 보입니다.")

    correctness_cycle = ["high", "high", "middle", "high", "low", "high"]
    for k, act in enumerate(teaching_acts):
        i = segment_base + k
        word, meaning, sentence = WORDS[(seed + k) % len(WORDS)]
        options = " ".join(
            f"{j+1}) {WORDS[(seed + k + j) % len(WORDS)][0]}" for j in range(4)
        )
        ask = f"tutor: "
        if k % 3 == 0:
            ask += f"[Activity{seed}-{k+1}][Gap Fills: {sentence} {options}]"
        ask += (
            f"[t.assess.display_question]Activity{seed}-{k+1}를 볼까요? "
            f'여기서 "{word}"는 어떤 뜻일까요? ({i})'
        )
        if k % 7 == 3:
            ask += f"[t.assess.request_rationale]왜 그렇게 생각하시는지도 말씀해 주세요. ({i})"
        lines.append(ask)

        corr = correctness_cycle[k % len(correctness_cycle)]
        lines.append(f"student: [s.answer.answer][{corr}]{meaning}... 같은 뜻인가요? ({i})")

        engage = ENGAGE_ACTS[k % len(ENGAGE_ACTS)]
        teach_text = TEACH_TEMPLATES[act].format(w=word, m=meaning, i=i)
        lines.append(
            f"tutor: [{engage}]{ENGAGE_TEXTS[engage]}"
            f"[{act}]{teach_text}"
            f'[t.assess.follow_up_question]그럼 "{word}"로 짧은 문장을 만들면 어떻게 될까요? ({i})'
        )

        s_act, s_corr, s_text = STUDENT_FOLLOWUPS[k % len(STUDENT_FOLLOWUPS)]
        corr_tag = f"[{s_corr}]" if s_corr else ""
        lines.append(f"student: [{s_act}]{corr_tag}{s_text.format(i=i)}")

    lines.append(
        f"tutor: [t.assess.confirmation_questions]{day}일차 내용 전체적으로 이해되셨나요?"
        f"[t.operational.wrap_up]다음 시간에는 {day + 1}일차 독해 파트를 이어서 볼게요."
    )
    lines.append(f"student: [s.operational.positive_feedback]네, {day}일차 수업 좋았습니다.")
    lines.append(f"tutor: [t.general]수고하셨어요. {day + 1}일차에 뵐게요!")
    return "\n".join(lines) + "\n"


EXPERT_ROWS = [
    {
        "content": "[Activity3-9] Gap Fills: You likely won't get answers from the other person, but a therapist can help you ___ these issues in an introspective way. 1) Vent 2) Navigate 3) Abuse 4) Withdraw",
        "act": "t.teach.method.vocab_expression.etymology",
        "utterance": '"Intro"는 "안쪽의"라는 뜻이고, "spect"는 "보다"라는 뜻입니다. 그래서 "Introspective"는 "자아성찰하는"이라는 뜻입니다.',
    },
    {
        "content": "[Activity2-12] Key Sentence: If you've been ghosted after dedicating a lot of energy to someone, it can be very draining.",
        "act": "t.teach.method.vocab_expression.code_switching",
        "utterance": '한국어로는 "진이 빠진다"라고 하죠. In English, "draining" captures exactly that feeling.',
    },
    {
        "content": "[Activity1-4] Gap Fills: Best friends met in a church group and hung out nearly every day, sharing their ___ thoughts. 1) Telltale 2) Innermost 3) Snubby 4) Cringey",
        "act": "t.teach.method.inferential_clue",
        "utterance": '빈칸 뒤의 "thoughts and feelings"가 단서예요. 속마음과 어울리는 선택지를 골라 보세요.',
    },
    {
        "content": "[Activity1-7] Key Sentence: She was left feeling confused and heartbroken after the ghosting happened.",
        "act": "t.teach.method.pronunciation",
        "utterance": '"heartbroken"은 h에 강세를 두고 "하ㅌ-브로큰"처럼 두 박자로 읽어요. 같이 발음해 볼까요?',
    },
    {
        "content": "[Activity2-3] Key Sentence: Prioritize taking care of yourself physically and mentally.",
        "act": "t.teach.method.background_knowledge",
        "utterance": '영어권에서 "self-care"는 단순한 휴식이 아니라 건강 관리 문화 전반을 가리키는 말이에요.',
    },
    {
        "content": "[Activity3-2] Gap Fills: A mentor can help you ___ the process. 1) navigate 2) vent 3) withdraw 4) snub",
        "act": "t.teach.request.read_aloud",
        "utterance": "정답 문장을 소리 내어 읽어봐 주세요. A mentor can help you navigate the process.",
    },
]


def main() -> None:
    root = os.path.join(os.path.dirname(__file__), "..")
    out_dir = os.path.join(root, "tests", "data")
    os.makedirs(out_dir, exist_ok=True)

    docs = [
        session_doc("fx-001", "tutor-alpha", "student-01", seed=1, segment_base=100),
        session_doc("fx-002", "tutor-alpha", "student-02", seed=2, segment_base=200),
        session_doc("fx-003", "tutor-beta", "student-03", seed=3, segment_base=300),
        session_doc("fx-004", "tutor-gamma", "student-04", seed=4, segment_base=400),
    ]
    corpus_text = "\n".join(docs)
    corpus_path = os.path.join(out_dir, "fixture_corpus.txt")
    with open(corpus_path, "w", encoding="utf-8") as fh:
        fh.write(corpus_text)

    taxonomy = load_taxonomy_file()
    sessions = parse_corpus_text(corpus_text, taxonomy)
    stats = corpus_stats(sessions)
    used_acts = set(stats.act_histogram)
    all_acts = {str(d.id) for d in taxonomy}
    print(f"sessions: {stats.n_sessions}")
    print(f"turns: {sum(len(s.turns) for s in sessions)}")
    print(f"act utterances: {sum(stats.act_histogram.values())}")
    print(f"acts missing from fixture: {sorted(all_acts - used_acts) or 'none'}")

    expert_path = os.path.join(out_dir, "expert_minority.jsonl")
    with open(expert_path, "w", encoding="utf-8") as fh:
        for row in EXPERT_ROWS:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"wrote {corpus_path} and {expert_path}")


if __name__ == "__main__":
    main()
