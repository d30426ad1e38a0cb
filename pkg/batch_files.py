# batch_files.py - Circuit, sidecar and sample batch files on disk

import json
import os
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from clifford_circuit import CliffordCircuit, emit_circuit, parse_circuit
from experiment_types import (BATCH_EXTENSION, CIRCUIT_EXTENSION, RESULTS_EXTENSION,
                              SIDECAR_EXTENSION, FermistabError)
from frame_sampler import SampleBatch

BATCH_FORMAT = "fermistab-batch-1"


def has_extension(filename: str, extension: str) -> bool:
    """Check a file name against one of the known extensions"""
    return os.path.splitext(filename)[1].lower() == extension


def scan_directory(directory: str, extension: str) -> List[str]:
    """Sorted paths of the files with the given extension; problems are reported, not raised"""
    if not os.path.exists(directory):
        print(f"Directory does not exist: {directory}")
        return []
    try:
        entries = os.listdir(directory)
    except PermissionError:
        print(f"Permission denied: {directory}")
        return []
    except OSError as e:
        print(f"Error listing directory {directory}: {e}")
        return []
    return [os.path.join(directory, entry) for entry in sorted(entries)
            if not entry.startswith(".") and has_extension(entry, extension)
            and os.path.isfile(os.path.join(directory, entry))]


def expand_inputs(paths: Iterable[str], extension: str) -> List[str]:
    """Files named directly plus matching files inside named directories"""
    found = []
    for path in paths:
        if os.path.isdir(path):
            found.extend(scan_directory(path, extension))
        elif os.path.isfile(path):
            found.append(path)
        else:
            raise FermistabError(f"no such file or directory: {path}")
    return found


def stem_paths(out_dir: str, name: str) -> Dict[str, str]:
    base = os.path.join(out_dir, name)
    return {
        "circuit": base + CIRCUIT_EXTENSION,
        "sidecar": base + SIDECAR_EXTENSION,
        "batch": base + BATCH_EXTENSION,
        "results": base + RESULTS_EXTENSION,
    }


def write_circuit(out_dir: str, name: str, circuit: CliffordCircuit, sidecar: dict) -> Tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = stem_paths(out_dir, name)
    with open(paths["circuit"], "w") as f:
        f.write(emit_circuit(circuit))
    write_json(paths["sidecar"], sidecar)
    return paths["circuit"], paths["sidecar"]


def write_json(path: str, data: dict) -> None:
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def read_json(path: str) -> dict:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FermistabError(f"{path} is not valid JSON: {e}") from None


def load_circuit(path: str) -> Tuple[CliffordCircuit, Optional[dict]]:
    """Circuit text plus its sidecar when one sits next to it"""
    with open(path, "r") as f:
        circuit = parse_circuit(f.read())
    sidecar_path = os.path.splitext(path)[0] + SIDECAR_EXTENSION
    sidecar = read_json(sidecar_path) if os.path.exists(sidecar_path) else None
    return circuit, sidecar


def _pack(bits: np.ndarray) -> bytes:
    if bits.shape[1] == 0:
        return b""
    return np.packbits(bits.astype(bool), axis=1, bitorder="little").tobytes()


def _unpack(data: bytes, shots: int, width: int) -> np.ndarray:
    if width == 0:
        return np.zeros((shots, 0), dtype=bool)
    row_bytes = (width + 7) // 8
    packed = np.frombuffer(data, dtype=np.uint8).reshape(shots, row_bytes)
    return np.unpackbits(packed, axis=1, count=width, bitorder="little").astype(bool)


class BatchWriter:
    """Header line (JSON) followed by packed blocks, each with its own JSON line"""

    def __init__(self, path: str, num_detectors: int, num_observables: int, num_aux: int, seed: int,
                 extra: Optional[dict] = None):
        self.path = path
        self.widths = (num_detectors, num_observables, num_aux)
        self.shots = 0
        self._file = open(path, "wb")
        header = {"format": BATCH_FORMAT, "detectors": num_detectors, "observables": num_observables,
                  "aux": num_aux, "seed": seed, **(extra or {})}
        self._file.write((json.dumps(header, sort_keys=True) + "\n").encode())

    def write(self, detectors: np.ndarray, observables: np.ndarray,
              aux_signs: Optional[np.ndarray] = None) -> None:
        shots = detectors.shape[0]
        aux_bits = np.zeros((shots, 0), dtype=bool) if aux_signs is None else aux_signs < 0
        payload = b"".join(_pack(block) for block in (detectors, observables, aux_bits))
        self._file.write((json.dumps({"shots": shots, "bytes": len(payload)}) + "\n").encode())
        self._file.write(payload)
        self.shots += shots

    def close(self) -> None:
        self._file.close()

    def __enter__(self) -> "BatchWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_batch(path: str) -> Tuple[SampleBatch, dict]:
    """Load every block of a batch file; returns the batch and its header"""
    with open(path, "rb") as f:
        try:
            header = json.loads(f.readline().decode())
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise FermistabError(f"{path} has no batch header") from None
        if header.get("format") != BATCH_FORMAT:
            raise FermistabError(f"{path}: unsupported batch format {header.get('format')}")
        widths = (header["detectors"], header["observables"], header["aux"])
        blocks: List[List[np.ndarray]] = [[], [], []]
        while True:
            line = f.readline()
            if not line.strip():
                break
            block = json.loads(line.decode())
            payload = f.read(block["bytes"])
            if len(payload) != block["bytes"]:
                raise FermistabError(f"{path}: truncated block")
            offset = 0
            for k, width in enumerate(widths):
                size = block["shots"] * ((width + 7) // 8) if width else 0
                blocks[k].append(_unpack(payload[offset:offset + size], block["shots"], width))
                offset += size
    detectors, observables, aux = (np.concatenate(b) if b else np.zeros((0, w), dtype=bool)
                                   for b, w in zip(blocks, widths))
    aux_signs = np.where(aux, -1, 1).astype(np.int8) if header["aux"] else None
    return SampleBatch(detectors, observables, aux_signs, header.get("seed", 0)), header
