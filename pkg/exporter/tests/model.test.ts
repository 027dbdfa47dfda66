import * as path from 'node:path'
import { fileURLToPath } from 'node:url'
import { describe, expect, it } from 'vitest'

import { ValidationError } from '../src/errors.js'
import { loadModelIR, resolveLayers } from '../src/model.js'

const fixtures = path.join(path.dirname(fileURLToPath(import.meta.url)), '..', 'fixtures')

describe('loadModelIR', () => {
  it('loads the linear probe with float64 weights', async () => {
    const model = await loadModelIR(path.join(fixtures, 'linear-probe'))
    expect(model.name).toBe('linear-probe')
    expect(model.inputShape).toEqual([36])
    expect(model.layers.map(l => l.name)).toEqual(['pass', 'probe'])
    const probe = model.layers[1]
    expect(probe.className).toBe('Dense')
    expect(probe.weights).toHaveLength(1) // bias-free
    expect(probe.weights[0].shape).toEqual([36, 4])
    expect(probe.weights[0].data).toBeInstanceOf(Float64Array)
  })

  it('loads the small cnn in depth order', async () => {
    const model = await loadModelIR(path.join(fixtures, 'small-cnn'))
    expect(model.inputShape).toEqual([6, 6, 1])
    expect(model.layers.map(l => l.className)).toEqual([
      'Conv2D',
      'AveragePooling2D',
      'Flatten',
      'Dense',
      'Dense',
    ])
    expect(model.layers[0].weights[0].shape).toEqual([3, 3, 1, 3])
  })
})

describe('resolveLayers', () => {
  it('maps names to 1-based depth positions', async () => {
    const model = await loadModelIR(path.join(fixtures, 'small-cnn'))
    const picked = resolveLayers(model, ['hidden', 'conv'])
    expect(picked.get('conv')).toBe(1)
    expect(picked.get('hidden')).toBe(4)
  })

  it('rejects unknown names and lists what exists', async () => {
    const model = await loadModelIR(path.join(fixtures, 'small-cnn'))
    expect(() => resolveLayers(model, ['nope'])).toThrowError(ValidationError)
    expect(() => resolveLayers(model, ['nope'])).toThrowError(/conv, pool, flat, hidden, out/)
  })
})
