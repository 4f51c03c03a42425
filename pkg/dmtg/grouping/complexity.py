from dataclasses import dataclass, asdict

from dmtg.grouping.model import GroupModel


def dense_flops(fan_in: int, fan_out: int) -> int:
    """Multiply-adds per sample of one dense layer."""
    return fan_in * fan_out


@dataclass(frozen=True)
class Complexity:
    encoder_flops_per_sample: int
    head_flops_per_sample: int
    encoder_params: int
    head_params: int
    # share of the head FLOPs in the naive single-encoder network with N heads
    heads_flops_portion: float

    @property
    def total_flops_per_sample(self) -> int:
        return self.encoder_flops_per_sample + self.head_flops_per_sample

    def to_dict(self) -> dict:
        return asdict(self)


def count_complexity(model: GroupModel, n_tasks: int, k_groups: int) -> Complexity:
    """
    Analytic cost of the K-branch, K x N-head network with the model's layer shapes.

    The shared trunk is counted once, branch encoders K times, and every
    one of the K x N heads maps the branch width to one output.
    """
    trunk_flops = sum(dense_flops(layer.fan_in, layer.fan_out) for layer in model.trunk)
    trunk_params = sum(layer.fan_in * layer.fan_out + layer.fan_out for layer in model.trunk)
    branch = model.branches[0]
    branch_flops = sum(dense_flops(layer.fan_in, layer.fan_out) for layer in branch.layers)
    branch_params = sum(layer.fan_in * layer.fan_out + layer.fan_out for layer in branch.layers)
    head_in = branch.head.fan_in

    encoder_flops = trunk_flops + k_groups * branch_flops
    head_flops = k_groups * n_tasks * dense_flops(head_in, 1)

    naive_encoder = trunk_flops + branch_flops
    naive_heads = n_tasks * dense_flops(head_in, 1)
    return Complexity(
        encoder_flops_per_sample=encoder_flops,
        head_flops_per_sample=head_flops,
        encoder_params=trunk_params + k_groups * branch_params,
        head_params=k_groups * n_tasks * (head_in + 1),
        heads_flops_portion=naive_heads / (naive_encoder + naive_heads),
    )
