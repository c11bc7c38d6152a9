"""Single-file model container.

Layout::

    EDSF1\\n
    <header byte length, 12 digits>\\n
    <JSON header: version, config, per-section metadata and tensor index>
    <raw little-endian float64 tensor data>

Sections are independent; stage 2 is added to a file that already holds
stage 1 with :func:`append_section`.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

MAGIC = b"EDSF1\n"
VERSION = 1


class ModelFormatError(ValueError):
    pass


def _pack(sections: dict, config: dict) -> bytes:
    header = {"version": VERSION, "config": config, "sections": {}}
    blobs, offset = [], 0
    for name in sorted(sections):
        meta, state = sections[name]
        index = []
        for key in sorted(state):
            arr = np.ascontiguousarray(state[key].detach().cpu().numpy(), dtype="<f8")
            data = arr.tobytes()
            index.append({"name": key, "shape": list(arr.shape), "offset": offset,
                          "nbytes": len(data)})
            blobs.append(data)
            offset += len(data)
        header["sections"][name] = {"meta": meta, "tensors": index}
    head = json.dumps(header, sort_keys=True, ensure_ascii=False).encode("utf-8")
    return MAGIC + f"{len(head):012d}\n".encode() + head + b"".join(blobs)


def _unpack(raw: bytes):
    if not raw.startswith(MAGIC):
        raise ModelFormatError("not an EDSF1 model file")
    pos = len(MAGIC)
    try:
        size = int(raw[pos:pos + 12])
    except ValueError:
        raise ModelFormatError("corrupt header length") from None
    pos += 13
    header = json.loads(raw[pos:pos + size].decode("utf-8"))
    if header.get("version") != VERSION:
        raise ModelFormatError(f"unsupported container version {header.get('version')}")
    data = raw[pos + size:]
    sections = {}
    for name, sec in header["sections"].items():
        state = {}
        for t in sec["tensors"]:
            chunk = data[t["offset"]:t["offset"] + t["nbytes"]]
            if len(chunk) != t["nbytes"]:
                raise ModelFormatError(f"truncated tensor {name}/{t['name']}")
            arr = np.frombuffer(chunk, dtype="<f8").reshape(t["shape"])
            state[t["name"]] = torch.tensor(arr.copy(), dtype=torch.float64)
        sections[name] = (sec["meta"], state)
    return sections, header["config"]


def write_container(path, sections: dict, config: dict) -> None:
    Path(path).write_bytes(_pack(sections, config))


def read_container(path):
    return _unpack(Path(path).read_bytes())


def append_section(path, name: str, meta: dict, state: dict) -> None:
    sections, config = read_container(path)
    sections[name] = (meta, state)
    write_container(path, sections, config)
