from reconstruction.forms import SynthForm, validated
from reconstruction.tasks import synthesize_scene

from ._base import PipelineCommand, defaults, reports_errors


class Command(PipelineCommand):
    help = 'Write a synthetic scene: cameras.json, one silhouette per view and gt.xyz'

    def add_arguments(self, parser):
        conf = defaults()
        parser.add_argument('--shape', default='square', help='square, two-bars, helix or file')
        parser.add_argument('--views', type=int, default=conf['VIEWS'])
        parser.add_argument('--res', type=int, default=conf['RESOLUTION'], help='Image width and height')
        parser.add_argument('--points', type=int, default=conf['POINTS'], help='Ground-truth point count')
        parser.add_argument('--radius', type=float, default=None,
                            help='Splat radius in pixels (default 1.5 scaled by res/64)')
        parser.add_argument('--camera-radius', type=float, default=conf['CAMERA_RADIUS'])
        parser.add_argument('--elevation', type=float, default=0.0, help='Ring elevation in degrees')
        parser.add_argument('--azimuth', type=float, default=0.0,
                            help='Angle of the first camera from +z in degrees')
        parser.add_argument('--seed', type=int, default=conf['SEED'])
        parser.add_argument('--path', default=None, help='Point cloud for --shape file')
        parser.add_argument('--out', required=True)

    @reports_errors
    def handle(self, *args, **options):
        opts = validated(SynthForm, options)
        directory = synthesize_scene(
            opts['shape'], opts['out'], n_views=opts['views'], image_size=opts['res'],
            n_points=opts['points'], seed=opts['seed'], splat_radius=opts['radius'],
            camera_radius=opts['camera_radius'], elevation=opts['elevation'], azimuth=opts['azimuth'],
            path=opts['path'] or None,
        )
        for path in sorted(directory.iterdir()):
            self.stdout.write(str(path))
