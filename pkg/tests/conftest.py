import pytest

from polykg import KnowledgeGraph


@pytest.fixture
def figure_graph():
    """Minimal graph around the Einstein/spouse fact used across tests."""
    g = KnowledgeGraph()
    g.add_lexicalization("Q937", "en", "Albert Einstein", description="physicist")
    g.add_lexicalization(
        "Q68761", "en", "Elsa Löwenthal", description="second wife of Albert Einstein"
    )
    g.add_lexicalization("Q68761", "de", "Elsa Löwenthal")
    g.add_relation_labels("P26", {"en": "spouse"})
    g.add_triplet("Q937", "P26", "Q68761")
    g.freeze()
    return g


@pytest.fixture
def paris_graph():
    """Two entities sharing the name Paris, told apart by their descriptions."""
    g = KnowledgeGraph()
    g.add_lexicalization("Q90", "en", "Paris", description="capital of France")
    g.add_lexicalization("Q167646", "en", "Paris", description="prince of Troy")
    g.add_lexicalization("Q6279", "en", "Joe Biden",
                         aliases=["Joseph R. Biden Jr.", "Joseph Robinette Biden Jr."],
                         description="President of the US")
    g.freeze()
    return g


@pytest.fixture
def biden_graph():
    """Joe Biden with English and Chinese lexicalizations."""
    g = KnowledgeGraph()
    g.add_lexicalization(
        "Q6279",
        "en",
        "Joe Biden",
        aliases=["Joseph R. Biden Jr.", "Joseph Robinette Biden Jr."],
        description="President of the US",
    )
    g.add_lexicalization("Q6279", "zh", "乔·拜登", aliases=["乔·罗宾内特·拜登"])
    g.freeze()
    return g
