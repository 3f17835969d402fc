import re
from pathlib import Path

from reconstruction.forms import SweepForm, validated
from reconstruction.tasks import run_sweep

from ._base import (PipelineCommand, add_reconstruction_arguments, loss_config, optim_config,
                    reports_errors, sampler_config)

# commas inside parentheses belong to names such as NN(1,5)
_VALUE_SEPARATOR = re.compile(r',(?![^()]*\))')


def split_values(text):
    return [value.strip() for value in _VALUE_SEPARATOR.split(text) if value.strip()]


class Command(PipelineCommand):
    help = 'Ablation sweep over one axis; writes one "setting,final_loss,cd_vs_gt" row per setting'

    def add_arguments(self, parser):
        parser.add_argument('scene')
        parser.add_argument('--axis', required=True,
                            help='loss-variant, neighbors, k, sampler or resolution')
        parser.add_argument('--values', default=None, help='Comma-separated settings overriding the defaults')
        add_reconstruction_arguments(parser)
        parser.add_argument('--parallel', type=int, default=1, help='Settings run concurrently')
        parser.add_argument('--out', default=None, help='CSV path (default: <scene>/sweep_<axis>.csv)')

    @reports_errors
    def handle(self, *args, **options):
        opts = validated(SweepForm, options)
        values = split_values(options['values']) if options['values'] else None
        frame = run_sweep(
            options['scene'], opts['axis'], opts['points'], values=values,
            base_sampler=sampler_config(opts), base_loss=loss_config(opts), base_optim=optim_config(opts),
            parallel=opts['parallel'],
        )
        out = Path(options['out'] or Path(options['scene']) / f"sweep_{opts['axis']}.csv")
        frame.to_csv(out, index=False, float_format='%.12g')
        self.stdout.write(frame.to_csv(index=False, float_format='%.6g').rstrip('\n'))
        self.stdout.write(f"written to {out}")
