from reconstruction.forms import SampleForm, validated
from reconstruction.tasks import sample_supervision

from ._base import PipelineCommand, add_sampler_arguments, reports_errors, sampler_config


class Command(PipelineCommand):
    help = 'Sample irregular point supervision from one silhouette image'

    def add_arguments(self, parser):
        parser.add_argument('image')
        add_sampler_arguments(parser, method_flags=('--method', '--sampler'))
        parser.add_argument('--epoch', type=int, default=0, help='Epoch for the dynamic sampler')
        parser.add_argument('--out', required=True, help='Output "x y" point file')

    @reports_errors
    def handle(self, *args, **options):
        opts = validated(SampleForm, options)
        points = sample_supervision(opts['image'], sampler_config(opts), opts['out'], epoch=opts['epoch'])
        self.stdout.write(f"{len(points)} points written to {opts['out']}")
