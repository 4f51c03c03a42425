"""
Grouped multi-task network.

Input -> optional shared trunk (T tanh layers) -> K branch encoders
(D - T tanh layers each) -> one linear head per (branch, task). A branch
whose head covers all N tasks is "fully connected"; the one-shot method
starts from K such branches and prunes down to N heads through the
assignment. A fixed-partition model has one branch per group whose head
only covers the member tasks.
"""

import copy
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from dmtg.autodiff import Tensor, matmul, add, tanh, replicate_rows, constant
from dmtg.errors import ShapeError, DomainError


@dataclass
class DenseLayer:
    weight: Tensor
    bias: Tensor

    @classmethod
    def init(cls, fan_in: int, fan_out: int, rng: np.random.Generator, name: str) -> "DenseLayer":
        # LeCun-normal suits tanh units
        w = rng.standard_normal((fan_in, fan_out)) / np.sqrt(fan_in)
        return cls(weight=Tensor(w, requires_grad=True, name=f"{name}.W"),
                   bias=Tensor(np.zeros((1, fan_out)), requires_grad=True, name=f"{name}.b"))

    @property
    def fan_in(self) -> int:
        return self.weight.rows

    @property
    def fan_out(self) -> int:
        return self.weight.cols

    def forward(self, x: Tensor, activate: bool = True) -> Tensor:
        z = add(matmul(x, self.weight), replicate_rows(self.bias, x.rows))
        return tanh(z) if activate else z

    def renamed(self, name: str) -> "DenseLayer":
        return DenseLayer(weight=Tensor(self.weight.values, requires_grad=True, name=f"{name}.W"),
                          bias=Tensor(self.bias.values, requires_grad=True, name=f"{name}.b"))

    def parameters(self) -> List[Tensor]:
        return [self.weight, self.bias]


@dataclass
class Branch:
    layers: List[DenseLayer]
    head: DenseLayer
    tasks: Tuple[int, ...]

    def encode(self, h: Tensor) -> Tensor:
        for layer in self.layers:
            h = layer.forward(h)
        return h

    def predict(self, h: Tensor) -> Tensor:
        return self.head.forward(self.encode(h), activate=False)

    def parameters(self) -> List[Tensor]:
        params = []
        for layer in self.layers:
            params.extend(layer.parameters())
        params.extend(self.head.parameters())
        return params


class GroupModel:
    def __init__(self, trunk: List[DenseLayer], branches: List[Branch], input_dim: int, n_tasks: int):
        if not branches:
            raise ShapeError("a group model needs at least one branch")
        self.trunk = trunk
        self.branches = branches
        self.input_dim = input_dim
        self.n_tasks = n_tasks

    # ------------------------- Construction -------------------------
    @classmethod
    def build(cls, input_dim: int, n_tasks: int, width: int, depth: int, shared_layers: int,
              branch_tasks: Sequence[Sequence[int]], rng: np.random.Generator) -> "GroupModel":
        """Fresh model; branch k predicts branch_tasks[k]."""
        if depth < 1:
            raise DomainError(f"depth must be at least 1, got {depth}")
        if not 0 <= shared_layers < depth:
            raise DomainError(f"shared_layers must be in [0, {depth - 1}], got {shared_layers}")
        fan_in = input_dim
        trunk = []
        for layer in range(shared_layers):
            trunk.append(DenseLayer.init(fan_in, width, rng, f"trunk.{layer}"))
            fan_in = width
        branches = []
        for k, tasks in enumerate(branch_tasks):
            tasks = tuple(int(t) for t in tasks)
            if not tasks:
                raise ShapeError(f"branch {k} has no tasks")
            layers = []
            branch_in = fan_in
            for layer in range(depth - shared_layers):
                layers.append(DenseLayer.init(branch_in, width, rng, f"branch{k}.{layer}"))
                branch_in = width
            head = DenseLayer.init(width, len(tasks), rng, f"branch{k}.head")
            branches.append(Branch(layers=layers, head=head, tasks=tasks))
        return cls(trunk, branches, input_dim, n_tasks)

    @classmethod
    def fully_connected(cls, input_dim: int, n_tasks: int, width: int, depth: int, shared_layers: int,
                        k_branches: int, rng: np.random.Generator) -> "GroupModel":
        all_tasks = tuple(range(n_tasks))
        return cls.build(input_dim, n_tasks, width, depth, shared_layers, [all_tasks] * k_branches, rng)

    @classmethod
    def clone_branches(cls, source: "GroupModel", k_branches: int) -> "GroupModel":
        """K weight-identical copies of a trained single-branch model's encoder and heads."""
        if source.k_branches != 1:
            raise ShapeError(f"cloning needs a single-branch source, got {source.k_branches} branches")
        trunk = [layer.renamed(f"trunk.{i}") for i, layer in enumerate(source.trunk)]
        template = source.branches[0]
        branches = []
        for k in range(k_branches):
            layers = [layer.renamed(f"branch{k}.{i}") for i, layer in enumerate(template.layers)]
            branches.append(Branch(layers=layers, head=template.head.renamed(f"branch{k}.head"),
                                   tasks=template.tasks))
        return cls(trunk, branches, source.input_dim, source.n_tasks)

    @classmethod
    def from_encoder(cls, source: "GroupModel", branch_tasks: Sequence[Sequence[int]]) -> "GroupModel":
        """
        One branch per task group, every branch starting from the source's
        encoder and from the source head columns of its member tasks.
        """
        if source.k_branches != 1:
            raise ShapeError(f"need a single-branch source, got {source.k_branches} branches")
        template = source.branches[0]
        column_of = {task: j for j, task in enumerate(template.tasks)}
        trunk = [layer.renamed(f"trunk.{i}") for i, layer in enumerate(source.trunk)]
        branches = []
        for k, tasks in enumerate(branch_tasks):
            cols = [column_of[t] for t in tasks]
            head = DenseLayer(
                weight=Tensor(template.head.weight.values[:, cols], requires_grad=True, name=f"branch{k}.head.W"),
                bias=Tensor(template.head.bias.values[:, cols], requires_grad=True, name=f"branch{k}.head.b"),
            )
            layers = [layer.renamed(f"branch{k}.{i}") for i, layer in enumerate(template.layers)]
            branches.append(Branch(layers=layers, head=head, tasks=tuple(tasks)))
        return cls(trunk, branches, source.input_dim, source.n_tasks)

    def copy(self) -> "GroupModel":
        return copy.deepcopy(self)

    # ------------------------- Shape facts -------------------------
    @property
    def k_branches(self) -> int:
        return len(self.branches)

    @property
    def shared_layers(self) -> int:
        return len(self.trunk)

    @property
    def depth(self) -> int:
        return self.shared_layers + len(self.branches[0].layers)

    @property
    def width(self) -> int:
        return self.branches[0].head.fan_in

    def is_fully_connected(self) -> bool:
        all_tasks = tuple(range(self.n_tasks))
        return all(branch.tasks == all_tasks for branch in self.branches)

    # ------------------------- Forward -------------------------
    def encode_shared(self, x) -> Tensor:
        h = constant(x)
        if h.cols != self.input_dim:
            raise ShapeError(f"batch has {h.cols} features, model expects {self.input_dim}")
        for layer in self.trunk:
            h = layer.forward(h)
        return h

    def branch_predictions(self, x) -> List[Tensor]:
        """B x |tasks_k| head outputs of every branch."""
        h = self.encode_shared(x)
        return [branch.predict(h) for branch in self.branches]

    # ------------------------- Parameters -------------------------
    def parameters(self) -> List[Tensor]:
        params = []
        for layer in self.trunk:
            params.extend(layer.parameters())
        for branch in self.branches:
            params.extend(branch.parameters())
        return params

    def named_arrays(self) -> Dict[str, np.ndarray]:
        return {p.name: p.values for p in self.parameters()}

    def load_arrays(self, arrays: Dict[str, np.ndarray]) -> None:
        for p in self.parameters():
            if p.name not in arrays:
                raise ShapeError(f"missing array for parameter '{p.name}'")
            value = np.asarray(arrays[p.name], dtype=np.float64)
            if value.shape != p.shape:
                raise ShapeError(f"parameter '{p.name}' expects {p.shape}, got {value.shape}")
            p.values = value.copy()
            p.zero_grad()

    def architecture(self) -> dict:
        return {
            "input_dim": self.input_dim, "n_tasks": self.n_tasks, "width": self.width,
            "depth": self.depth, "shared_layers": self.shared_layers,
            "branch_tasks": [list(b.tasks) for b in self.branches],
        }

    @classmethod
    def from_architecture(cls, arch: dict) -> "GroupModel":
        """Zero-filled model of the given layout, ready for load_arrays()."""
        model = cls.build(arch["input_dim"], arch["n_tasks"], arch["width"], arch["depth"],
                          arch["shared_layers"], arch["branch_tasks"], np.random.default_rng(0))
        for p in model.parameters():
            p.values = np.zeros_like(p.values)
        return model
