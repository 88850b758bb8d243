"""Deterministic synthetic corpus for offline runs and tests.

Documents are drawn from a fixed set of topics; each topic couples a word
pool with MeSH headings, so embedding neighbors, co-occurrence counts, and
descriptor overlap all carry real signal. The same seed always produces
byte-identical XML and fixtures.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .corpus import Document, MeshAnnotation

__all__ = [
    "TOPICS",
    "make_corpus",
    "write_medline_xml",
    "write_elink_fixtures",
]

# topic name -> (word pool, [(descriptor, qualifiers)])
TOPICS = {
    "cardio": (
        "heart cardiac ventricular myocardial infarction ischemia artery "
        "coronary pressure systolic diastolic valve atrial arrhythmia "
        "failure output ejection perfusion angina stenosis".split(),
        [("Heart Failure", ("physiopathology", "therapy")),
         ("Myocardial Ischemia", ("diagnosis",)),
         ("Blood Pressure", ())],
    ),
    "neuro": (
        "brain neuron synaptic cortex hippocampus axon dendrite glial "
        "plasticity cognitive memory seizure dopamine receptor cortical "
        "lesion stimulus potential spine inhibitory".split(),
        [("Brain", ("physiology", "pathology")),
         ("Neurons", ("metabolism",)),
         ("Memory", ())],
    ),
    "onco": (
        "tumor cancer malignant metastasis carcinoma proliferation "
        "apoptosis oncogene mutation chemotherapy radiation biopsy "
        "lymphoma melanoma sarcoma staging remission relapse marker "
        "growth".split(),
        [("Neoplasms", ("drug therapy", "genetics")),
         ("Apoptosis", ()),
         ("Mutation", ())],
    ),
    "immuno": (
        "antibody antigen immune lymphocyte cytokine inflammation "
        "macrophage interferon interleukin vaccine autoimmune tolerance "
        "complement histocompatibility rejection allergy mast basophil "
        "innate adaptive".split(),
        [("Antibodies", ("immunology",)),
         ("Cytokines", ("metabolism",)),
         ("Inflammation", ())],
    ),
    "micro": (
        "bacteria bacterial infection antibiotic resistance pathogen "
        "virulence plasmid biofilm colony culture strain gram sepsis "
        "antimicrobial penicillin clinical isolate spore toxin "
        "susceptibility".split(),
        [("Bacteria", ("drug effects", "genetics")),
         ("Anti-Bacterial Agents", ("pharmacology",)),
         ("Drug Resistance", ())],
    ),
    "endo": (
        "insulin glucose diabetes metabolic hormone thyroid pancreatic "
        "receptor secretion obesity lipid cholesterol adipose glycemic "
        "cortisol estrogen pituitary adrenal signaling homeostasis".split(),
        [("Insulin", ("metabolism",)),
         ("Diabetes Mellitus", ("blood", "therapy")),
         ("Glucose", ())],
    ),
}

_COMMON = (
    "study patients results analysis clinical treatment effect group "
    "control method data significant observed measured compared outcome".split()
)


def make_corpus(n_docs: int, seed: int = 0, start_pmid: int = 100001) -> list[Document]:
    """n_docs documents over the fixed topics, deterministic in seed."""
    if n_docs < 1:
        raise ValueError("n_docs must be >= 1")
    rng = random.Random(seed)
    names = sorted(TOPICS)
    docs = []
    for i in range(n_docs):
        topic = names[i % len(names)]
        words, mesh_spec = TOPICS[topic]
        title = " ".join(rng.choices(words, k=6)).capitalize()
        body_words = rng.choices(words, k=42) + rng.choices(_COMMON, k=14)
        rng.shuffle(body_words)
        abstract = " ".join(body_words).capitalize() + "."
        mesh = []
        # first heading is the major topic; qualifiers kept per spec list
        for j, (descriptor, quals) in enumerate(mesh_spec):
            if j > 0 and rng.random() < 0.25:
                continue  # some docs carry a subset of the topic headings
            mesh.append(
                MeshAnnotation(
                    descriptor,
                    major_topic=(j == 0),
                    qualifiers=tuple((q, False) for q in quals),
                )
            )
        docs.append(Document(start_pmid + i, title, abstract, mesh))
    return docs


def _mesh_xml(mesh: Sequence[MeshAnnotation]) -> str:
    if not mesh:
        return ""
    headings = []
    for ann in mesh:
        major = "Y" if ann.major_topic else "N"
        quals = "".join(
            f'<QualifierName MajorTopicYN="{"Y" if qm else "N"}">'
            f"{escape(q)}</QualifierName>"
            for q, qm in ann.qualifiers
        )
        headings.append(
            "<MeshHeading>"
            f'<DescriptorName MajorTopicYN="{major}">{escape(ann.descriptor)}'
            f"</DescriptorName>{quals}</MeshHeading>"
        )
    return "<MeshHeadingList>" + "".join(headings) + "</MeshHeadingList>"


def write_medline_xml(docs: Sequence[Document], path) -> Path:
    """Serialize documents as a citation set the ingest pipeline accepts."""
    parts = ['<?xml version="1.0" encoding="UTF-8"?>', "<PubmedArticleSet>"]
    for doc in docs:
        parts.append(
            "<PubmedArticle><MedlineCitation>"
            f'<PMID Version="1">{doc.pmid}</PMID>'
            f"<Article><ArticleTitle>{escape(doc.title)}</ArticleTitle>"
            f"<Abstract><AbstractText>{escape(doc.abstract)}</AbstractText>"
            "</Abstract></Article>"
            f"{_mesh_xml(doc.mesh)}"
            "</MedlineCitation></PubmedArticle>"
        )
    parts.append("</PubmedArticleSet>")
    path = Path(path)
    path.write_text("\n".join(parts), encoding="utf-8")
    return path


def write_elink_fixtures(
    docs: Sequence[Document], fixture_dir, k: int = 12, seed: int = 0
) -> Path:
    """One eLink response per document: neighbors ranked by shared
    descriptor count (pmid as tie-break), scores descending through the
    raw range seen in collection (tens of millions), the query's own
    self-link served first the way the live endpoint does."""
    fixture_dir = Path(fixture_dir)
    fixture_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    desc = {doc.pmid: doc.descriptor_labels() for doc in docs}
    for doc in docs:
        others = sorted(
            (o for o in docs if o.pmid != doc.pmid),
            key=lambda o: (-len(desc[doc.pmid] & desc[o.pmid]), o.pmid),
        )[:k]
        top = 75_000_000 - rng.randint(0, 1_000_000)
        floor = 18_000_000 + rng.randint(0, 1_000_000)
        links = [f"<Link><Id>{doc.pmid}</Id><Score>{top + 1_000_000}</Score></Link>"]
        for i, o in enumerate(others):
            if len(others) == 1:
                score = top
            else:
                score = int(top - i * (top - floor) / (len(others) - 1))
            links.append(f"<Link><Id>{o.pmid}</Id><Score>{score}</Score></Link>")
        body = (
            '<?xml version="1.0"?><eLinkResult><LinkSet>'
            f"<DbFrom>pubmed</DbFrom><IdList><Id>{doc.pmid}</Id></IdList>"
            "<LinkSetDb><DbTo>pubmed</DbTo><LinkName>pubmed_pubmed</LinkName>"
            + "".join(links)
            + "</LinkSetDb></LinkSet></eLinkResult>"
        )
        (fixture_dir / f"{doc.pmid}.xml").write_text(body, encoding="utf-8")
    return fixture_dir
