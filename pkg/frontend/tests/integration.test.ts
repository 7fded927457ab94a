/**
 * End-to-end check against the Python consumer: an exported scene must pass
 * `mvov3d validate` and run through `mvov3d run` cleanly, and the resulting
 * predictions must be accurate on this easy demo capture.
 */

import { spawnSync } from 'child_process'
import { existsSync, mkdtempSync, readFileSync, rmSync } from 'fs'
import { tmpdir } from 'os'
import { join } from 'path'

import { afterAll, describe, expect, it } from 'vitest'

import { exportScene, makeDemoCapture } from '../src/exporter'

const root = mkdtempSync(join(tmpdir(), 'mvov3d-e2e-'))
afterAll(() => rmSync(root, { recursive: true, force: true }))

function mvov3d(...args: string[]) {
  const res = spawnSync('mvov3d', args, { encoding: 'utf8', timeout: 120_000 })
  return { status: res.status, stdout: res.stdout ?? '', stderr: res.stderr ?? '' }
}

describe('exported scenes drive the consumer pipeline', () => {
  const sceneDir = exportScene(
    {
      outputRoot: root,
      maskModel: 'sam',
      captionModel: 'decap',
      distractors: ['lamp', 'window'],
    },
    'demo',
    makeDemoCapture()
  )

  it('passes validation', () => {
    const res = mvov3d('validate', sceneDir)
    expect(res.stderr).toBe('')
    expect(res.status).toBe(0)
    expect(res.stdout).toContain('ok')
  })

  it('runs end-to-end and predicts the demo scene accurately', () => {
    const out = join(root, 'run_out')
    const res = mvov3d(
      'run',
      '--scene', sceneDir,
      '--labels', join(sceneDir, 'labels.json'),
      '--out', out
    )
    expect(res.stderr).toBe('')
    expect(res.status).toBe(0)
    expect(existsSync(join(out, 'point_features.bin'))).toBe(true)
    expect(existsSync(join(out, 'pred_labels.bin'))).toBe(true)
    const summary = JSON.parse(readFileSync(join(out, 'summary.json'), 'utf8'))
    expect(summary.miou).toBeGreaterThan(0.9)
  })

  it('a corrupted export is rejected with the validation exit code', () => {
    const broken = exportScene(
      {
        outputRoot: root,
        maskModel: 'sam',
        captionModel: 'ram++',
        distractors: [],
      },
      'broken',
      makeDemoCapture()
    )
    rmSync(join(broken, 'points.bin'))
    const res = mvov3d('validate', broken)
    expect(res.status).toBe(2)
    expect(res.stderr).toContain('points.bin')
  })
})
