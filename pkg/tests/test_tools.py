import asyncio

import pytest

from ising_mcp.tools import ALL_TOOLS, route_tool
from ising_mcp.tools.common import graph_from_arguments

from conftest import TRIANGLE_TEXT


def call(name, arguments):
    result = asyncio.run(route_tool(name, arguments))
    assert len(result) == 1
    return result[0].text


def test_tool_names():
    assert {t.name for t in ALL_TOOLS} == {
        "generate_graph", "exact_ground_state", "run_portfolio",
        "estimate_ground_state", "stability_scan", "critical_thresholds",
    }
    for tool in ALL_TOOLS:
        assert tool.inputSchema["type"] == "object"


def test_graph_arguments(triangle_file):
    assert graph_from_arguments({"graph_text": TRIANGLE_TEXT, "graph_name": "tri"}).name == "tri"
    assert graph_from_arguments({"graph_text": TRIANGLE_TEXT}).name is None
    assert graph_from_arguments({"graph_path": str(triangle_file)}).name == "triangle"
    for tool in ALL_TOOLS:
        if "graph_text" in tool.inputSchema["properties"]:
            assert "graph_name" in tool.inputSchema["properties"]


def test_unknown_tool():
    with pytest.raises(ValueError):
        asyncio.run(route_tool("send_message", {}))


def test_generate_graph(tmp_path):
    text = call("generate_graph", {"nodes": 5, "edges": 4, "seed": 1})
    assert text.startswith("5 4\n")
    out = tmp_path / "g.txt"
    text = call("generate_graph", {"nodes": 5, "edges": 4, "seed": 1, "out_path": str(out)})
    assert out.exists()
    assert text.startswith("Wrote random_n5_m4_s1")


def test_exact_ground_state_from_text():
    text = call("exact_ground_state", {"graph_text": TRIANGLE_TEXT})
    assert "H_min: -1" in text
    assert "Optimal cut: 2" in text
    assert "Degeneracy (flip pairs): 3" in text


def test_exact_ground_state_from_path(triangle_file):
    text = call("exact_ground_state", {"graph_path": str(triangle_file), "max_minimizers": 1})
    assert "... 2 more" in text


def test_errors_are_reported_as_text():
    assert call("exact_ground_state", {"graph_text": "3 2\n1 2 1\n"}).startswith("Error: GraphFormatError:")
    assert call("exact_ground_state", {}).startswith("Error: IsingError:")
    assert call("generate_graph", {"nodes": 3, "edges": 9}).startswith("Error: IsingError:")


def test_run_portfolio_on_inline_graph(tmp_path):
    out = tmp_path / "report.yaml"
    text = call("run_portfolio", {"graph_text": "2 1\n1 2 1\n", "trials": 2, "ks_max": 4, "t_end": 20,
                                  "out_path": str(out)})
    assert "Portfolio best cut: 1" in text
    assert "dim: best cut 1 in 2 trials" in text
    assert out.exists()


def test_estimate_ground_state():
    text = call("estimate_ground_state", {"graph_text": TRIANGLE_TEXT, "ks_max": 1.0, "t_end": 100.0})
    assert "Estimated H_min: -1" in text
    assert "Estimated cut: 2" in text


def test_stability_scan():
    text = call("stability_scan", {"graph_text": TRIANGLE_TEXT, "Ks": 0.5})
    assert text.startswith("H,lambda_min,lambda_max,count,stable_count")
    assert "selectively stabilizable: yes" in text
    assert "Selective Ks window: [0.780776, 2)" in text


def test_critical_thresholds():
    text = call("critical_thresholds", {"graph_text": TRIANGLE_TEXT, "K": 1.0})
    assert "pi/2 destabilizes above Ks = 0.5" in text
    assert "ground states favoured above Ks = 0.666666667" in text
    text = call("critical_thresholds", {"graph_text": TRIANGLE_TEXT, "spins": ["+++"]})
    assert "+++ stabilizes above Ks = 2" in text
