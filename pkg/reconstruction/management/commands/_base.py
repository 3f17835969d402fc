from functools import wraps

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from reconstruction.exceptions import ProjectionMatchingError
from reconstruction.utils.matching_loss import LossConfig
from reconstruction.utils.optimize import OptimConfig
from reconstruction.utils.sampling import SamplerConfig


def defaults():
    return settings.PROJECTION_MATCHING


def reports_errors(handle):
    """Turn pipeline failures into CommandError so Django prints them and exits nonzero."""
    @wraps(handle)
    def wrapper(self, *args, **options):
        try:
            return handle(self, *args, **options)
        except ProjectionMatchingError as exc:
            raise CommandError(str(exc)) from exc
    return wrapper


def checked_config(build):
    """Config constructors reject bad values with ValueError; report those as CommandError."""
    @wraps(build)
    def wrapper(cleaned):
        try:
            return build(cleaned)
        except ValueError as exc:
            raise CommandError(f"Invalid configuration: {exc}") from exc
    return wrapper


def add_sampler_arguments(parser, method_flags=('--sampler', '--method')):
    conf = defaults()
    parser.add_argument(*method_flags, dest='method', default='sas',
                        help='sas, random, pixel, pixel+random, poisson or dynamic')
    parser.add_argument('--k', type=int, default=conf['K'], help='Requested supervision points per view')
    parser.add_argument('--threshold', type=float, default=conf['THRESHOLD'])
    parser.add_argument('--seed', type=int, default=conf['SEED'])


def add_reconstruction_arguments(parser):
    conf = defaults()
    add_sampler_arguments(parser)
    parser.add_argument('--points', type=int, default=conf['POINTS'], help='Points in the reconstructed cloud')
    parser.add_argument('--steps', type=int, default=conf['STEPS'])
    parser.add_argument('--lr', type=float, default=conf['LEARNING_RATE'])
    parser.add_argument('--beta1', type=float, default=conf['ADAM_BETA1'])
    parser.add_argument('--beta2', type=float, default=conf['ADAM_BETA2'])
    parser.add_argument('--adam-eps', type=float, default=conf['ADAM_EPS'])
    parser.add_argument('--init', default='sphere', help='sphere or cube')
    parser.add_argument('--resample-every', type=int, default=0,
                        help='Redraw supervision every N steps (dynamic sampler only)')
    parser.add_argument('--log-every', type=int, default=conf['LOG_EVERY'])
    parser.add_argument('--nn-first', type=int, default=1)
    parser.add_argument('--nn-second', type=int, default=1)
    parser.add_argument('--terms', default='both', help='both, first or second')
    parser.add_argument('--workers', type=int, default=conf['WORKERS'],
                        help='Threads for per-view loss evaluation')


@checked_config
def sampler_config(cleaned):
    return SamplerConfig(method=cleaned['method'], k_target=cleaned['k'],
                         threshold=cleaned['threshold'], seed=cleaned['seed'])


@checked_config
def loss_config(cleaned):
    return LossConfig(nn_first=cleaned['nn_first'], nn_second=cleaned['nn_second'],
                      use_first=cleaned['terms'] in ('both', 'first'),
                      use_second=cleaned['terms'] in ('both', 'second'))


@checked_config
def optim_config(cleaned):
    return OptimConfig(steps=cleaned['steps'], learning_rate=cleaned['lr'],
                       adam_beta1=cleaned['beta1'], adam_beta2=cleaned['beta2'],
                       adam_eps=cleaned['adam_eps'], init=cleaned['init'], seed=cleaned['seed'],
                       resample_every=cleaned['resample_every'], log_every=cleaned['log_every'],
                       workers=cleaned['workers'])


class PipelineCommand(BaseCommand):
    requires_system_checks = []
