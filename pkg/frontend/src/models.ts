/**
 * Model backends. Real foundation-model inference is deliberately hidden
 * behind these interfaces; the mock implementations are deterministic and
 * weight-free so exports are reproducible anywhere.
 */

import { extractNounPhrases } from './nounPhrases'

export type VlmChoice = 'openseg-mock'
export type MaskChoice = 'sam' | 'grounding-dino' | 'sam-gd'
export type CaptionChoice = 'decap' | 'blip' | 'ram++'

export interface TextEncoder {
  /** L2-normalized embedding for a text prompt. */
  encode(text: string): Float64Array
  readonly dim: number
}

export interface Captioner {
  /** Text proposals for an image region known to contain `className`. */
  proposals(className: string, distractors: string[]): string[]
}

/** fnv-1a, good enough to seed a per-string PRNG. */
function fnv1a(s: string): number {
  let h = 0x811c9dc5
  for (let i = 0; i < s.length; i++) {
    h ^= s.charCodeAt(i)
    h = Math.imul(h, 0x01000193)
  }
  return h >>> 0
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0
  return () => {
    a = (a + 0x6d2b79f5) >>> 0
    let t = Math.imul(a ^ (a >>> 15), 1 | a)
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

/** Deterministic stand-in for a CLIP-style text encoder. */
export class HashTextEncoder implements TextEncoder {
  constructor(readonly dim: number = 32) {}

  encode(text: string): Float64Array {
    const rand = mulberry32(fnv1a(text.toLowerCase().trim()))
    const v = new Float64Array(this.dim)
    let norm = 0
    for (let i = 0; i < this.dim; i++) {
      // Box-Muller for roughly isotropic directions
      const u = Math.max(rand(), 1e-12)
      v[i] = Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * rand())
      norm += v[i] * v[i]
    }
    norm = Math.sqrt(norm)
    for (let i = 0; i < this.dim; i++) v[i] /= norm
    return v
  }
}

/** Sentence-style captioner (DeCap/BLIP path): noun phrases from a caption. */
export class SentenceCaptioner implements Captioner {
  proposals(className: string, distractors: string[]): string[] {
    const scenery = distractors.join(' and a ')
    const caption = `there is a ${className} in a room with a ${scenery} nearby`
    return extractNounPhrases(caption)
  }
}

/** Tag-style captioner (RAM++ path): output tags are used directly. */
export class TagCaptioner implements Captioner {
  proposals(className: string, distractors: string[]): string[] {
    const tags = [className, ...distractors].map((t) => t.toLowerCase().trim())
    return [...new Set(tags)]
  }
}

export function makeCaptioner(choice: CaptionChoice): Captioner {
  return choice === 'ram++' ? new TagCaptioner() : new SentenceCaptioner()
}

/** Mask producers differ only in reported confidence in the mock backends. */
export function maskConfidence(choice: MaskChoice): number {
  switch (choice) {
    case 'sam':
      return 0.9
    case 'grounding-dino':
      return 0.85
    case 'sam-gd':
      return 0.95
  }
}
