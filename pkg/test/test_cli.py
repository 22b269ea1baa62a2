import json
import logging

import pytest

from helpers import *
from fogsim.cli import main, EXIT_OK, EXIT_FAILED_FRAMES, EXIT_ERROR
from fogsim.pipeline.formats import encode_image
from fogsim.pipeline.manifest import MANIFEST_NAME


@pytest.fixture(autouse=True)
def restore_logging():
    package_logger = logging.getLogger('fogsim')
    handlers = list(package_logger.handlers)
    level = package_logger.level
    yield
    package_logger.handlers = handlers
    package_logger.setLevel(level)


@pytest.fixture
def dataset(tmp_path, rng):
    return make_toy_dataset(tmp_path / 'input', rng)


def test_run(dataset, tmp_path, capsys):
    out = tmp_path / 'output'
    code = main([
        'run', '--input', str(dataset), '--output', str(out),
        '--mode', 'mixed', '--levels', '50,100,150', '--seed', '3'])
    assert code == EXIT_OK

    text = capsys.readouterr().out
    assert "scenes processed  3" in text
    assert "frames failed     0" in text

    manifest = json.loads((out / MANIFEST_NAME).read_text())
    assert manifest['policy']['mixed_levels'] == [50., 100., 150.]
    assert manifest['policy']['seed'] == 3


def test_run_with_config(dataset, tmp_path):
    config = tmp_path / 'config.yaml'
    config.write_text("lidar:\n    noise_floor: 0.2\n")
    out = tmp_path / 'output'
    code = main([
        'run', '--input', str(dataset), '--output', str(out),
        '--config', str(config), '--airlight', '0.7'])
    assert code == EXIT_OK

    manifest = json.loads((out / MANIFEST_NAME).read_text())
    assert manifest['config']['lidar']['noise_floor'] == 0.2
    assert manifest['scenes'][0]['frames'][0]['airlight'] == [0.7, 0.7, 0.7]


def test_run_scene_list(dataset, tmp_path):
    scenes = tmp_path / 'scenes.txt'
    scenes.write_text("s2\n\ns3\n")
    out = tmp_path / 'output'
    assert main(['run', '--input', str(dataset), '--output', str(out), '--scenes', str(scenes)]) == EXIT_OK

    manifest = json.loads((out / MANIFEST_NAME).read_text())
    assert [scene['scene_id'] for scene in manifest['scenes']] == ['s2', 's3']


def test_run_with_failed_frames(dataset, tmp_path):
    (dataset / 's2' / 'depth' / '001.png').write_bytes(b"garbage")
    code = main(['run', '--input', str(dataset), '--output', str(tmp_path / 'output')])
    assert code == EXIT_FAILED_FRAMES


@pytest.mark.parametrize('args', [
    ['--mor', '-5'],
    ['--mode', 'mixed', '--levels', '100,50'],
    ['--mode', 'mixed', '--levels', 'fifty'],
    ['--workers', '0'],
    ])
def test_run_invalid_arguments(dataset, tmp_path, args):
    code = main(['run', '--input', str(dataset), '--output', str(tmp_path / 'output')] + args)
    assert code == EXIT_ERROR


def test_run_missing_input(tmp_path):
    code = main(['run', '--input', str(tmp_path / 'missing'), '--output', str(tmp_path / 'output')])
    assert code == EXIT_ERROR


def test_run_broken_config(dataset, tmp_path):
    config = tmp_path / 'config.yaml'
    config.write_text("camera:\n    gamma: 2.2\n")
    code = main([
        'run', '--input', str(dataset), '--output', str(tmp_path / 'output'),
        '--config', str(config)])
    assert code == EXIT_ERROR


def test_stats(dataset, tmp_path, capsys):
    report = tmp_path / 'report.json'
    assert main(['stats', '--input', str(dataset), '--json', str(report)]) == EXIT_OK

    text = capsys.readouterr().out
    assert "images            6" in text

    data = json.loads(report.read_text())
    assert data['n_images'] == 6
    assert 0 <= data['mean_luminance'] <= 1


def test_stats_of_image_directory(tmp_path, rng, capsys):
    images = tmp_path / 'images'
    images.mkdir()
    for i in range(3):
        image = (rng.uniform(0, 1, size=(10, 12, 3)) * 255).astype('uint8')
        (images / '{i}.png'.format(i=i)).write_bytes(encode_image(image))

    assert main(['stats', '--input', str(images)]) == EXIT_OK
    assert "images            3" in capsys.readouterr().out


def test_stats_of_empty_directory(tmp_path):
    assert main(['stats', '--input', str(tmp_path)]) == EXIT_ERROR


def test_stats_of_frames_without_depth(tmp_path, rng):
    root = make_toy_dataset(tmp_path / 'input', rng, scenes=('s1', 's2'), frames=('000',))
    for path in (root / 's2' / 'depth').iterdir():
        path.unlink()

    report = tmp_path / 'report.json'
    assert main(['stats', '--input', str(root), '--json', str(report)]) == EXIT_OK
    assert json.loads(report.read_text())['n_images'] == 2


def test_stats_in_parallel(dataset, tmp_path):
    serial = tmp_path / 'serial.json'
    parallel = tmp_path / 'parallel.json'
    assert main(['stats', '--input', str(dataset), '--json', str(serial)]) == EXIT_OK
    assert main([
        'stats', '--input', str(dataset), '--json', str(parallel), '--workers', '2']) == EXIT_OK
    assert serial.read_bytes() == parallel.read_bytes()


def test_stats_skips_unreadable_images(dataset, tmp_path):
    (dataset / 's1' / 'images' / '000.png').write_bytes(b"not a png")
    report = tmp_path / 'report.json'
    assert main(['stats', '--input', str(dataset), '--json', str(report)]) == EXIT_OK
    assert json.loads(report.read_text())['n_images'] == 5


def test_preview(dataset, tmp_path, capsys):
    out = tmp_path / 'output'
    main(['run', '--input', str(dataset), '--output', str(out)])
    capsys.readouterr()

    code = main([
        'preview', '--input', str(dataset), '--output', str(out), '--scene', 's1', '--frame', '001'])
    assert code == EXIT_OK
    assert (out / 'previews' / 's1' / '001.png').exists()

    code = main([
        'preview', '--input', str(dataset), '--output', str(out), '--scene', 's1', '--frame', '999'])
    assert code == EXIT_FAILED_FRAMES


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        main(['--version'])
    assert e.value.code == 0
    assert capsys.readouterr().out.startswith('fogsim ')
