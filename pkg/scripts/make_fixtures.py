#!/usr/bin/env python3
"""Regenerate everything under fixtures/ deterministically.

Snapshots carry checksums, so they are built here rather than edited by hand.
"""

import json
import os
import random
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from mgl.bk import KnowledgeEdge, Snapshot, save_snapshot, tokenize  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def write(path, text):
    full = os.path.join(FIXTURES, path)
    os.makedirs(os.path.dirname(full), exist_ok=True)
    with open(full, "w", encoding="utf-8") as f:
        f.write(text)
    print("wrote", os.path.relpath(full))


def edges(pairs, weight=2.0):
    return [KnowledgeEdge(a, "related_to", b, weight) for a, b in pairs]


# ---------------------------------------------------------------------------
# Learning-task fixtures (facts/rules text format)

CHAIN_BK = """\
% one-hop task: 'mother' connects straight to 'family'
contains([call,mother],call).
contains([call,mother],mother).
contains([swim,lesson],swim).
contains([swim,lesson],lesson).
related_to(mother,family).
related_to(call,phone).
related_to(swim,exercise).
"""

INVENTION_BK = """\
% two-hop task: family words reach 'home' only through 'family'
contains([call,mother],call).
contains([call,mother],mother).
contains([visit,grandma],visit).
contains([visit,grandma],grandma).
contains([text,sister],text).
contains([text,sister],sister).
contains([hug,dad],hug).
contains([hug,dad],dad).
contains([swim,lesson],swim).
contains([swim,lesson],lesson).
contains([send,email],send).
contains([send,email],email).
contains([play,tennis],play).
contains([play,tennis],tennis).
contains([finish,report],finish).
contains([finish,report],report).
contains([buy,laptop],buy).
contains([buy,laptop],laptop).
contains([run,race],run).
contains([run,race],race).
related_to(mother,family).
related_to(grandma,family).
related_to(sister,family).
related_to(dad,family).
related_to(family,home).
related_to(swim,exercise).
related_to(email,work).
related_to(tennis,sport).
related_to(report,work).
related_to(laptop,office).
related_to(run,sport).
"""

RECURSION_BK = """\
% mixed-hop task: 1, 2 and 3 related_to steps to 'home'
contains([stay,family],stay).
contains([stay,family],family).
contains([call,mother],call).
contains([call,mother],mother).
contains([plan,trip],plan).
contains([plan,trip],trip).
contains([swim,lesson],swim).
contains([swim,lesson],lesson).
contains([send,email],send).
contains([send,email],email).
related_to(family,home).
related_to(mother,family).
related_to(trip,travel).
related_to(travel,family).
related_to(swim,exercise).
related_to(email,work).
"""

PAPER_RULES = """\
% every learned rule printed in the write-ups this repo reproduces
category(A,B) :- contains(A,C), related_to(C,B).
category(A,B) :- contains(A,C), category_1(C,B).
category_1(A,B) :- related_to(A,C), related_to(C,B).
category_1(A,B) :- related_to(A,C), category_1(C,B).
category_1(A,home) :- related_to(A,home).
category(A,family) :- contains(A,B), related_to(B,shop).
category(A,work) :- contains(A,B), related_to(B,letter).
category(A,sport) :- contains(A,B), related_to(B,exercise).
related_to(mother, family).
related_to(call, phone).
contains([registering,gym],gym).
contains([call,mother],call).
contains([call,mother],mother).
"""


# ---------------------------------------------------------------------------
# Task dataset: 15 family / 9 work / 5 sport

TASKS = [
    ("call mother", "family"),
    ("visit grandma", "family"),
    ("buy gift for sister", "family"),
    ("pick up the kids", "family"),
    ("call dad tonight", "family"),
    ("visit uncle joe", "family"),
    ("aunt birthday card", "family"),
    ("dinner with cousins", "family"),
    ("drive brother to school", "family"),
    ("watch movie with grandpa", "family"),
    ("plan the reunion", "family"),
    ("call mum urgently", "family"),
    ("send flowers to grandmother", "family"),
    ("babysit the nephew", "family"),
    ("wedding anniversary with wife", "family"),
    ("email the boss", "work"),
    ("prepare meeting slides", "work"),
    ("finish the quarterly report", "work"),
    ("schedule interview with client", "work"),
    ("review pull request from colleague", "work"),
    ("book conference room", "work"),
    ("submit invoice to office", "work"),
    ("update project deadline", "work"),
    ("print contract for manager", "work"),
    ("swim lesson", "sport"),
    ("go jogging in the park", "sport"),
    ("play tennis with coach", "sport"),
    ("gym workout", "sport"),
    ("watch football match", "sport"),
]

TASK_EDGES = [
    # family words, one hop
    ("mother", "family"), ("grandma", "family"), ("sister", "family"),
    ("kids", "family"), ("dad", "family"), ("uncle", "family"),
    ("aunt", "family"), ("cousins", "family"), ("brother", "family"),
    ("grandpa", "family"), ("reunion", "family"), ("grandmother", "family"),
    ("nephew", "family"), ("wife", "family"),
    # 'mum' needs two hops (mum -> mother -> family)
    ("mum", "mother"),
    # work words
    ("boss", "work"), ("meeting", "work"), ("report", "work"),
    ("client", "work"), ("colleague", "work"), ("conference", "work"),
    ("office", "work"), ("deadline", "work"), ("manager", "work"),
    ("invoice", "office"),
    # sport words
    ("swim", "sport"), ("jogging", "sport"), ("tennis", "sport"),
    ("gym", "sport"), ("football", "sport"), ("coach", "sport"),
]


# ---------------------------------------------------------------------------
# Synthetic news-like corpus: 1000 headlines across five categories

NEWS_VOCAB = {
    "environment": ["climate", "pollution", "wildlife", "forest", "recycling",
                    "emissions", "ocean", "drought", "solar", "conservation"],
    "sports": ["championship", "tournament", "goalkeeper", "marathon", "playoffs",
               "stadium", "athlete", "league", "referee", "medal"],
    "tech": ["software", "startup", "smartphone", "robotics", "encryption",
             "browser", "chipmaker", "algorithm", "server", "gadget"],
    "politics": ["senate", "election", "diplomat", "parliament", "legislation",
                 "campaign", "treaty", "governor", "ballot", "minister"],
    "business": ["merger", "shares", "inflation", "retailer", "earnings",
                 "banking", "investors", "startup_funding", "exports", "tariffs"],
}

NEWS_TEMPLATES = [
    "new {w} plan announced today",
    "experts debate {w} outlook",
    "report highlights {w} concerns",
    "local leaders discuss {w} strategy",
    "{w} numbers surprise analysts",
    "why {w} matters this year",
    "inside the {w} story",
    "{w} update draws attention",
]


def make_news(n=1000, seed=20240201):
    rng = random.Random(seed)
    cats = sorted(NEWS_VOCAB)
    lines = []
    for i in range(n):
        cat = cats[i % len(cats)]
        word = rng.choice(NEWS_VOCAB[cat])
        template = rng.choice(NEWS_TEMPLATES)
        lines.append(json.dumps({"headline": template.format(w=word), "category": cat.upper()}))
    return "\n".join(lines) + "\n"


def main():
    write("chain_task/pos.facts", "category([call,mother],family).\n")
    write("chain_task/neg.facts", "category([swim,lesson],family).\n")
    write("chain_task/bk.facts", CHAIN_BK)

    write(
        "invention_task/pos.facts",
        "".join(
            f"category([{w}],home).\n"
            for w in ["call,mother", "visit,grandma", "text,sister", "hug,dad"]
        ),
    )
    write(
        "invention_task/neg.facts",
        "".join(
            f"category([{w}],home).\n"
            for w in ["swim,lesson", "send,email", "play,tennis",
                      "finish,report", "buy,laptop", "run,race"]
        ),
    )
    write("invention_task/bk.facts", INVENTION_BK)

    write(
        "recursion_task/pos.facts",
        "".join(
            f"category([{w}],home).\n" for w in ["stay,family", "call,mother", "plan,trip"]
        ),
    )
    write(
        "recursion_task/neg.facts",
        "".join(f"category([{w}],home).\n" for w in ["swim,lesson", "send,email"]),
    )
    write("recursion_task/bk.facts", RECURSION_BK)

    write("paper_rules.rules", PAPER_RULES)

    paper_pairs = [
        ("mother", "family"), ("call", "phone"), ("family", "home"),
        ("swim", "exercise"), ("trip", "travel"), ("travel", "family"),
        ("gym", "exercise"), ("lesson", "class"),
        ("swim", "sport"), ("gym", "sport"), ("call", "work"),
    ]
    paper_words = sorted({w for pair in paper_pairs for w in pair})
    save_snapshot(
        Snapshot(edges(paper_pairs), paper_words, source_tag="fixture paper-bk"),
        os.path.join(FIXTURES, "paper_bk.facts"),
    )
    print("wrote paper_bk.facts")

    write(
        "tasks.csv",
        "text,category\n" + "".join(f"{t},{c}\n" for t, c in TASKS),
    )
    fetched = sorted({w for t, _ in TASKS for w in tokenize(t)} | {"family", "work", "sport"})
    save_snapshot(
        Snapshot(edges(TASK_EDGES), fetched, source_tag="fixture tasks"),
        os.path.join(FIXTURES, "tasks_snapshot.facts"),
    )
    print("wrote tasks_snapshot.facts")

    news = make_news()
    write("news_sample.jsonl", news)
    news_pairs = [(w, cat) for cat, words in NEWS_VOCAB.items() for w in words]
    news_words = sorted(
        {w for line in news.splitlines() for w in tokenize(json.loads(line)["headline"])}
        | set(NEWS_VOCAB)
    )
    save_snapshot(
        Snapshot(edges(news_pairs), news_words, source_tag="fixture news"),
        os.path.join(FIXTURES, "news_snapshot.facts"),
    )
    print("wrote news_snapshot.facts")


if __name__ == "__main__":
    main()
