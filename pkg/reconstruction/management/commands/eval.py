from reconstruction.forms import EvalForm, validated
from reconstruction.utils.evaluation import DEFAULT_RESOLUTION
from reconstruction.tasks import evaluate_clouds

from ._base import PipelineCommand, reports_errors


class Command(PipelineCommand):
    help = 'Score a reconstruction against a reference cloud: prints "cd=<value> iou=<value>"'

    def add_arguments(self, parser):
        parser.add_argument('recon')
        parser.add_argument('reference')
        parser.add_argument('--resolution', type=int, default=DEFAULT_RESOLUTION, help='Voxel grid resolution')
        parser.add_argument('--normalize', action='store_true',
                            help="Scale both clouds so the reconstruction's bounding-box diagonal is 1")

    @reports_errors
    def handle(self, *args, **options):
        opts = validated(EvalForm, options)
        scores = evaluate_clouds(opts['recon'], opts['reference'], resolution=opts['resolution'],
                                 normalize=options['normalize'])
        self.stdout.write(f"cd={scores['cd']:.6f} iou={scores['iou']:.6f}")
