import json

import pytest
import torch
from helpers import tiny_config

from edsparse.config import SEED_ENV, TrainConfig, default_seed
from edsparse.graph import is_connected, serialize_eds
from edsparse.model_io import MAGIC, ModelFormatError, append_section, read_container, write_container
from edsparse.pipeline import Parser, train_parser


@pytest.fixture(scope="module")
def parser(synthetic):
    return train_parser(synthetic[:16], synthetic[16:20], tiny_config())


def test_config_defaults_and_validation(tmp_path, monkeypatch):
    cfg = TrainConfig()
    assert (cfg.batch_size, cfg.clip, cfg.cost_fp, cfg.cost_fn) == (32, 5.0, 0.4, 0.6)
    assert TrainConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError, match="unknown config keys"):
        TrainConfig.from_dict({"epochs": 3})
    with pytest.raises(ValueError):
        TrainConfig(lr=0)
    with pytest.raises(ValueError):
        TrainConfig(activation="gelu")
    assert cfg.replace(lr=None, hidden=7).hidden == 7
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"seed": 9, "hidden": 3}))
    assert TrainConfig.from_file(path).seed == 9
    monkeypatch.setenv(SEED_ENV, "42")
    assert default_seed() == 42


def test_container_round_trip(tmp_path):
    path = tmp_path / "m.bin"
    state = {"w": torch.arange(6, dtype=torch.float64).reshape(2, 3), "b": torch.tensor([0.5])}
    write_container(path, {"a": ({"k": "v"}, state)}, {"seed": 3})
    assert path.read_bytes().startswith(MAGIC)
    append_section(path, "z", {}, {"x": torch.ones(1, dtype=torch.float64)})
    sections, cfg = read_container(path)
    assert cfg == {"seed": 3} and set(sections) == {"a", "z"}
    meta, back = sections["a"]
    assert meta == {"k": "v"}
    assert all(torch.equal(back[k], state[k]) for k in state)


def test_container_errors(tmp_path):
    path = tmp_path / "m.bin"
    path.write_bytes(b"NOPE")
    with pytest.raises(ModelFormatError, match="not an EDSF1"):
        read_container(path)
    write_container(path, {"a": ({}, {"w": torch.ones(4, dtype=torch.float64)})}, {})
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(ModelFormatError, match="truncated"):
        read_container(path)
    raw = path.read_bytes().replace(b'"version": 1', b'"version": 7')
    path.write_bytes(raw)
    with pytest.raises(ModelFormatError, match="version"):
        read_container(path)


def test_save_load_preserves_output(parser, synthetic, tmp_path):
    path = tmp_path / "model.edsf"
    parser.save(path)
    loaded = Parser.load(path)
    assert loaded.config == parser.config and loaded.uses_ctx is False
    for x in synthetic[20:26]:
        assert serialize_eds(loaded.parse(x.sentence)) == serialize_eds(parser.parse(x.sentence))
    parser.save(tmp_path / "again.edsf")
    assert (tmp_path / "again.edsf").read_bytes() == path.read_bytes()


def test_missing_section(tmp_path):
    path = tmp_path / "m.edsf"
    write_container(path, {"tagger": ({}, {})}, tiny_config().to_dict())
    with pytest.raises(ValueError, match="arcs"):
        Parser.load(path)


def test_parse_connected_flag(parser, synthetic):
    for x in synthetic[:8]:
        g = parser.parse(x.sentence)
        if len(g):
            assert is_connected(g)
            assert g.top in {n.id for n in g.nodes}
        loose = parser.parse(x.sentence, connected=False)
        assert {n.id for n in loose.nodes} == {n.id for n in g.nodes}
        assert set(loose.edges) <= set(g.edges)
