/**
 * Scene exporter: turns a raw capture (points + posed views) into an
 * interchange directory the mvov3d pipeline consumes — binary tensors,
 * manifest.json, and labels.json.
 */

import { mkdirSync, writeFileSync } from 'fs'
import { join } from 'path'

import {
  CaptionChoice,
  HashTextEncoder,
  MaskChoice,
  TextEncoder,
  makeCaptioner,
  maskConfidence,
} from './models'
import { writeTensor } from './tensorFile'

export interface RawCamera {
  /** 3x3 row-major intrinsics. */
  intrinsics: number[]
  /** 4x4 row-major world-to-camera transform. */
  extrinsics: number[]
  width: number
  height: number
}

export interface RawView {
  imageId: string
  camera: RawCamera
}

/** A captured scene before any model inference has been applied. */
export interface RawCapture {
  /** M points, flat [x0,y0,z0, x1,...]. */
  points: Float64Array
  /** Optional per-point unit normals, flat, same length as points. */
  normals?: Float64Array
  /** Per-point class index into classNames. */
  labels: Int32Array
  /** Per-point instance id. */
  instances: Int32Array
  classNames: string[]
  views: RawView[]
}

export interface ExportJob {
  outputRoot: string
  maskModel: MaskChoice
  captionModel: CaptionChoice
  /** Extra nouns handed to the captioner alongside each region's class. */
  distractors: string[]
  encoder?: TextEncoder
}

const BACKGROUND = 'background'

interface Projection {
  row: Int32Array
  col: Int32Array
  depth: Float64Array
  visible: Uint8Array
}

function projectAll(capture: RawCapture, cam: RawCamera): Projection {
  const m = capture.points.length / 3
  const K = cam.intrinsics
  const E = cam.extrinsics
  const row = new Int32Array(m)
  const col = new Int32Array(m)
  const depth = new Float64Array(m)
  const visible = new Uint8Array(m)
  for (let i = 0; i < m; i++) {
    const x = capture.points[3 * i]
    const y = capture.points[3 * i + 1]
    const z = capture.points[3 * i + 2]
    const cz = E[8] * x + E[9] * y + E[10] * z + E[11]
    depth[i] = cz
    if (cz <= 0) continue
    const cx = E[0] * x + E[1] * y + E[2] * z + E[3]
    const cy = E[4] * x + E[5] * y + E[6] * z + E[7]
    const u = Math.round((K[0] * cx) / cz + K[2])
    const v = Math.round((K[4] * cy) / cz + K[5])
    if (u < 0 || u >= cam.width || v < 0 || v >= cam.height) continue
    row[i] = v
    col[i] = u
    visible[i] = 1
  }
  return { row, col, depth, visible }
}

/** Far-to-near point splat; returns the z-buffer and per-pixel winning point. */
function renderDepth(proj: Projection, cam: RawCamera): { depth: Float64Array; winner: Int32Array } {
  const n = cam.width * cam.height
  const depth = new Float64Array(n)
  const winner = new Int32Array(n).fill(-1)
  const order = [...proj.visible.keys()].filter((i) => proj.visible[i])
  order.sort((a, b) => proj.depth[b] - proj.depth[a])
  for (const i of order) {
    const px = proj.row[i] * cam.width + proj.col[i]
    depth[px] = proj.depth[i]
    winner[px] = i
  }
  return { depth, winner }
}

function dedupe(texts: string[]): string[] {
  return [...new Set(texts)]
}

/**
 * Export one scene. Returns the directory the scene was written to.
 *
 * Per view this emits a rendered depth map, dense per-pixel features (the
 * mock VLM: class embedding at geometry pixels, background elsewhere), one
 * region mask + embedding per visible instance, and captioner-derived text
 * proposals with encoder embeddings.
 */
export function exportScene(job: ExportJob, sceneId: string, capture: RawCapture): string {
  const encoder = job.encoder ?? new HashTextEncoder()
  const captioner = makeCaptioner(job.captionModel)
  const confidence = maskConfidence(job.maskModel)
  const dim = encoder.dim
  const m = capture.points.length / 3

  const dir = join(job.outputRoot, sceneId)
  mkdirSync(dir, { recursive: true })

  const classEmb = capture.classNames.map((n) => encoder.encode(n))
  const backgroundEmb = encoder.encode(BACKGROUND)

  writeTensor(join(dir, 'points.bin'), capture.points, [m, 3], 'float32')
  writeTensor(join(dir, 'gt_labels.bin'), capture.labels, [m], 'int32')
  writeTensor(join(dir, 'gt_instances.bin'), capture.instances, [m], 'int32')
  const cloudEntry: Record<string, string> = {
    points: 'points.bin',
    labels: 'gt_labels.bin',
    instances: 'gt_instances.bin',
  }
  if (capture.normals) {
    writeTensor(join(dir, 'normals.bin'), capture.normals, [m, 3], 'float32')
    cloudEntry.normals = 'normals.bin'
  }

  const viewEntries = []
  for (const view of capture.views) {
    const cam = view.camera
    const vid = view.imageId
    const proj = projectAll(capture, cam)
    const { depth, winner } = renderDepth(proj, cam)
    const pixels = cam.width * cam.height

    const features = new Float64Array(pixels * dim)
    for (let px = 0; px < pixels; px++) {
      const emb = winner[px] >= 0 ? classEmb[capture.labels[winner[px]]] : backgroundEmb
      features.set(emb, px * dim)
    }

    // one region per instance with at least one winning pixel
    const instancePixels = new Map<number, number[]>()
    for (let px = 0; px < pixels; px++) {
      if (winner[px] < 0) continue
      const inst = capture.instances[winner[px]]
      const list = instancePixels.get(inst)
      if (list) list.push(px)
      else instancePixels.set(inst, [px])
    }
    const instanceIds = [...instancePixels.keys()].sort((a, b) => a - b)

    const masks = new Uint8Array(instanceIds.length * pixels)
    const regionEmb = new Float64Array(instanceIds.length * dim)
    const regionConf = new Float64Array(instanceIds.length).fill(confidence)
    const proposals: { text: string; embedding: number[] }[][] = []
    instanceIds.forEach((inst, s) => {
      for (const px of instancePixels.get(inst)!) masks[s * pixels + px] = 1
      const anyPoint = winner[instancePixels.get(inst)![0]]
      const className = capture.classNames[capture.labels[anyPoint]]
      regionEmb.set(classEmb[capture.labels[anyPoint]], s * dim)
      const texts = dedupe(captioner.proposals(className, job.distractors))
      proposals.push(
        texts.map((t) => ({ text: t, embedding: [...encoder.encode(t)] }))
      )
    })

    writeTensor(join(dir, `${vid}_depth.bin`), depth, [cam.height, cam.width], 'float32')
    writeTensor(join(dir, `${vid}_features.bin`), features, [cam.height, cam.width, dim], 'float32')
    const entry: Record<string, unknown> = {
      image_id: vid,
      camera: {
        intrinsics: cam.intrinsics,
        extrinsics: cam.extrinsics,
        width: cam.width,
        height: cam.height,
      },
      depth_file: `${vid}_depth.bin`,
      feature_file: `${vid}_features.bin`,
    }
    if (instanceIds.length > 0) {
      writeTensor(
        join(dir, `${vid}_masks.bin`),
        masks,
        [instanceIds.length, cam.height, cam.width],
        'uint8'
      )
      writeTensor(join(dir, `${vid}_region_embeddings.bin`), regionEmb, [instanceIds.length, dim], 'float32')
      writeTensor(join(dir, `${vid}_region_confidences.bin`), regionConf, [instanceIds.length], 'float32')
      writeFileSync(join(dir, `${vid}_text_proposals.json`), JSON.stringify(proposals))
      entry.region_masks_file = `${vid}_masks.bin`
      entry.region_embeddings_file = `${vid}_region_embeddings.bin`
      entry.region_confidences_file = `${vid}_region_confidences.bin`
      entry.text_proposals_file = `${vid}_text_proposals.json`
    }
    viewEntries.push(entry)
  }

  const manifest = {
    format_version: 1,
    scene_id: sceneId,
    feature_dim: dim,
    point_cloud: cloudEntry,
    views: viewEntries,
  }
  writeFileSync(join(dir, 'manifest.json'), JSON.stringify(manifest, null, 2) + '\n')

  const labelNames = [...capture.classNames, BACKGROUND]
  const labelDoc = {
    names: labelNames,
    embeddings: [...classEmb, backgroundEmb].map((e) => [...e]),
    ignore_id: -1,
  }
  writeFileSync(join(dir, 'labels.json'), JSON.stringify(labelDoc, null, 2) + '\n')
  return dir
}

/**
 * Deterministic demo capture: three axis-aligned square planes, each one
 * instance of one furniture class, observed by one fronto-parallel look-at
 * camera per plane.
 */
export function makeDemoCapture(): RawCapture {
  const classNames = ['chair', 'table', 'wall']
  const side = 10
  const extent = 1.0
  const width = 64
  const height = 48
  const f = 0.9 * width

  const points: number[] = []
  const normals: number[] = []
  const labels: number[] = []
  const instances: number[] = []
  const centers: number[][] = []

  for (let p = 0; p < classNames.length; p++) {
    const axis = p % 3
    const center = [0, 0, 0]
    center[axis] = -2.0 - 1.5 * p
    centers.push(center)
    const normal = [0, 0, 0]
    normal[axis] = 1
    const u = [0, 0, 0]
    u[(axis + 1) % 3] = 1
    const v = cross(normal, u)
    for (let a = 0; a < side; a++) {
      for (let b = 0; b < side; b++) {
        const du = -extent + (2 * extent * a) / (side - 1)
        const dv = -extent + (2 * extent * b) / (side - 1)
        points.push(
          center[0] + du * u[0] + dv * v[0],
          center[1] + du * u[1] + dv * v[1],
          center[2] + du * u[2] + dv * v[2]
        )
        normals.push(normal[0], normal[1], normal[2])
        labels.push(p)
        instances.push(p)
      }
    }
  }

  const views: RawView[] = centers.map((target, p) => {
    const axis = p % 3
    const eye = [...target]
    eye[axis] += 3.0
    return {
      imageId: `view${String(p).padStart(3, '0')}`,
      camera: lookAtCamera(eye, target, f, width, height),
    }
  })

  return {
    points: Float64Array.from(points),
    normals: Float64Array.from(normals),
    labels: Int32Array.from(labels),
    instances: Int32Array.from(instances),
    classNames,
    views,
  }
}

function cross(a: number[], b: number[]): number[] {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ]
}

function normalize(a: number[]): number[] {
  const n = Math.hypot(a[0], a[1], a[2])
  return [a[0] / n, a[1] / n, a[2] / n]
}

/** World-to-camera look-at pose plus a centered pinhole intrinsic matrix. */
export function lookAtCamera(
  eye: number[],
  target: number[],
  f: number,
  width: number,
  height: number
): RawCamera {
  const forward = normalize([target[0] - eye[0], target[1] - eye[1], target[2] - eye[2]])
  const upHint = Math.abs(forward[1]) < 0.9 ? [0, 1, 0] : [1, 0, 0]
  const right = normalize(cross(forward, upHint))
  const down = cross(forward, right)
  const rows = [right, down, forward]
  const extrinsics = new Array(16).fill(0)
  for (let r = 0; r < 3; r++) {
    for (let c = 0; c < 3; c++) extrinsics[4 * r + c] = rows[r][c]
    extrinsics[4 * r + 3] = -(rows[r][0] * eye[0] + rows[r][1] * eye[1] + rows[r][2] * eye[2])
  }
  extrinsics[15] = 1
  return {
    intrinsics: [f, 0, width / 2, 0, f, height / 2, 0, 0, 1],
    extrinsics,
    width,
    height,
  }
}
