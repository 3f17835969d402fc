from pathlib import Path

from django.core.management.base import CommandError

from reconstruction.forms import ReconstructForm, validated
from reconstruction.tasks import reconstruct_scene
from reconstruction.utils.manifest import RunManifest

from ._base import (PipelineCommand, add_reconstruction_arguments, loss_config, optim_config,
                    reports_errors, sampler_config)


class Command(PipelineCommand):
    help = 'Recover a point cloud from a scene directory; writes recon.xyz, trace.csv and manifest.json'

    def add_arguments(self, parser):
        parser.add_argument('scene', nargs='?', help='Scene directory (omit with --manifest)')
        add_reconstruction_arguments(parser)
        parser.add_argument('--manifest', default=None, help='Replay every setting of an earlier run')
        parser.add_argument('--out', default=None, help='Output directory (default: the scene directory)')

    @reports_errors
    def handle(self, *args, **options):
        if options['manifest']:
            manifest = RunManifest.load(options['manifest'])
        else:
            if not options['scene']:
                raise CommandError('a scene directory or --manifest is required')
            opts = validated(ReconstructForm, options)
            manifest = RunManifest(
                scene=str(options['scene']),
                n_points=opts['points'],
                sampler=sampler_config(opts),
                loss=loss_config(opts),
                optim=optim_config(opts),
            )
        out = options['out'] or manifest.scene
        result = reconstruct_scene(manifest, Path(out))

        self.stdout.write(f"recon={result['recon']}")
        self.stdout.write(f"trace={result['trace']}")
        self.stdout.write(f"manifest={result['manifest']}")
        line = f"initial_loss={result['initial_loss']:.6g} final_loss={result['final_loss']:.6g}"
        if result['cd'] is not None:
            line += f" cd={result['cd']:.6f}"
        self.stdout.write(line)
