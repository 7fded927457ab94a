import { describe, expect, it } from 'vitest'

import { extractNounPhrases } from '../src/nounPhrases'

describe('extractNounPhrases', () => {
  it('recovers every object noun from a long furniture caption', () => {
    const caption =
      'there is a chair and a lamp in a room with a clock on the wall and a ' +
      'window behind it and a lamp on the floor in front of the window'
    expect(extractNounPhrases(caption)).toEqual([
      'chair',
      'lamp',
      'room',
      'clock',
      'wall',
      'window',
      'floor',
    ])
  })

  it('returns nothing for empty or noun-free input', () => {
    expect(extractNounPhrases('')).toEqual([])
    expect(extractNounPhrases('   ')).toEqual([])
    expect(extractNounPhrases('the')).toEqual([])
  })

  it('lowercases and deduplicates by first appearance', () => {
    expect(extractNounPhrases('a Sofa next to a sofa near the Television')).toEqual([
      'sofa',
      'television',
    ])
  })

  it('drops pronouns', () => {
    const out = extractNounPhrases('she put it on the table next to them')
    expect(out).toContain('table')
    for (const banned of ['she', 'it', 'them']) expect(out).not.toContain(banned)
  })

  // small hand-annotated corpus; extraction must recover at least 90% of
  // the annotated nouns overall
  it('reaches 90% recall on an annotated caption corpus', () => {
    const corpus: [string, string[]][] = [
      ['a bed with a pillow and a blanket', ['bed', 'pillow', 'blanket']],
      ['the kitchen has a sink and an oven', ['kitchen', 'sink', 'oven']],
      ['a dog sleeping on a rug near the door', ['dog', 'rug', 'door']],
      ['two chairs around a wooden table', ['chairs', 'table']],
      ['a mirror hanging above the dresser', ['mirror', 'dresser']],
      ['a laptop and a mug on the desk', ['laptop', 'mug', 'desk']],
      ['the bathroom contains a bathtub and a towel', ['bathroom', 'bathtub', 'towel']],
      ['a bookshelf full of books beside the couch', ['bookshelf', 'books', 'couch']],
      ['a plant in a pot by the window', ['plant', 'pot', 'window']],
      ['the ceiling fan spins above the carpet', ['ceiling', 'fan', 'carpet']],
      ['a painting of a mountain on the wall', ['painting', 'mountain', 'wall']],
      ['a refrigerator next to the stove in the corner', ['refrigerator', 'stove', 'corner']],
      ['shoes left under the bench in the hallway', ['shoes', 'bench', 'hallway']],
      ['a television mounted above the fireplace', ['television', 'fireplace']],
      ['a curtain covering the window near the radiator', ['curtain', 'window', 'radiator']],
      ['the cat is sitting on the cushion', ['cat', 'cushion']],
      ['a ladder leaning against the cabinet', ['ladder', 'cabinet']],
      ['a keyboard and a monitor on the table', ['keyboard', 'monitor', 'table']],
      ['towels stacked on a shelf in the closet', ['towels', 'shelf', 'closet']],
      ['a lamp beside the sofa lights the room', ['lamp', 'sofa', 'room']],
    ]
    let expected = 0
    let recovered = 0
    for (const [caption, nouns] of corpus) {
      const found = new Set(extractNounPhrases(caption))
      expected += nouns.length
      for (const n of nouns) if (found.has(n)) recovered++
    }
    expect(recovered / expected).toBeGreaterThanOrEqual(0.9)
  })
})
