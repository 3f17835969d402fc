import enum
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..exceptions import FileFormatError
from .matching_loss import LossConfig
from .optimize import OptimConfig
from .sampling import SamplerConfig


def _plain(config):
    return {key: (value.value if isinstance(value, enum.Enum) else value)
            for key, value in asdict(config).items()}


@dataclass
class RunManifest:
    """Everything needed to replay a reconstruction from its input files."""

    scene: str
    n_points: int
    sampler: SamplerConfig
    loss: LossConfig
    optim: OptimConfig
    outputs: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'scene': self.scene,
            'n_points': self.n_points,
            'sampler': _plain(self.sampler),
            'loss': _plain(self.loss),
            'optim': _plain(self.optim),
            'outputs': dict(self.outputs),
        }

    def save(self, path):
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write('\n')

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            with open(path) as f:
                data = json.load(f)
            return cls(
                scene=data['scene'],
                n_points=int(data['n_points']),
                sampler=SamplerConfig(**data['sampler']),
                loss=LossConfig(**data['loss']),
                optim=OptimConfig(**data['optim']),
                outputs=data.get('outputs', {}),
            )
        except OSError as exc:
            raise FileFormatError(path, f"cannot read manifest: {exc}") from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(path, f"malformed manifest: {exc}") from exc
