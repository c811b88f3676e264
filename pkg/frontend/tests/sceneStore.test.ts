import { describe, expect, it } from 'vitest'

import type { SceneDelta, SceneSnapshot } from '../src/api'
import { SceneStore } from '../src/sceneStore'
import { Viewport, spheresForInstance } from '../src/viewport'

function snapshot(ids: number[], mode = 'protein'): SceneSnapshot {
  return {
    version: 1,
    seed: 0,
    instances: ids.map((id) => ({
      id,
      ingredient: 'Au',
      position: [id, 0, 0],
      quaternion: [1, 0, 0, 0],
    })),
    view: { colors: {}, highlights: [], render_mode: mode as never, labeling: false },
    ingredients: {
      Au: { bounding_radius: 0.4, color: [1, 0.84, 0], pivot: [0, 0, 0], chains: null },
    },
    session: {
      id: 1, selected_ingredients: [], selected_skeleton: null,
      pending_selection: null, rules: [],
    },
  }
}

function delta(partial: Partial<SceneDelta>): SceneDelta {
  return {
    type: 'scene-delta',
    added: [],
    removed: [],
    view: { colors: {}, highlights: [], render_mode: 'protein', labeling: false },
    instance_count: 0,
    ...partial,
  }
}

describe('SceneStore', () => {
  it('replaces from a snapshot', () => {
    const store = new SceneStore()
    store.replace(snapshot([1, 2, 3]))
    expect(store.count()).toBe(3)
  })

  it('applies removals incrementally', () => {
    const store = new SceneStore()
    store.replace(snapshot([1, 2, 3]))
    const needsFetch = store.applyDelta(delta({ removed: [2], instance_count: 2 }))
    expect(needsFetch).toBe(false)
    expect(store.count()).toBe(2)
    expect(store.instances.has(2)).toBe(false)
  })

  it('requests a refetch for additive deltas', () => {
    const store = new SceneStore()
    store.replace(snapshot([1]))
    const needsFetch = store.applyDelta(delta({ added: [[2, 5]], instance_count: 5 }))
    expect(needsFetch).toBe(true)
  })

  it('detects count drift', () => {
    const store = new SceneStore()
    store.replace(snapshot([1, 2]))
    expect(store.applyDelta(delta({ instance_count: 7 }))).toBe(true)
  })
})

describe('Viewport scene graph', () => {
  it('draws one sphere per instance in protein mode', () => {
    const store = new SceneStore()
    store.replace(snapshot([1, 2, 3, 4]))
    const viewport = new Viewport()
    viewport.update(store)
    expect(viewport.instanceCount()).toBe(4)
    expect(viewport.sphereCount()).toBe(4)
  })

  it('count matches the latest snapshot after deltas + reconcile', () => {
    const store = new SceneStore()
    const viewport = new Viewport()
    store.onChange = () => viewport.update(store)
    store.replace(snapshot([1, 2, 3]))
    const needsFetch = store.applyDelta(delta({ added: [[4, 6]], instance_count: 6 }))
    expect(needsFetch).toBe(true)
    store.replace(snapshot([1, 2, 3, 4, 5, 6])) // the reconcile fetch
    expect(viewport.instanceCount()).toBe(store.count())
  })

  it('expands chains and residues per render mode', () => {
    const instance = {
      id: 1, ingredient: 'SpyCatcher',
      position: [0, 0, 0] as [number, number, number],
      quaternion: [1, 0, 0, 0] as [number, number, number, number],
    }
    const info = {
      bounding_radius: 2, color: [0, 1, 0] as [number, number, number],
      pivot: [0, 0, 0] as [number, number, number],
      chains: [
        [[0, 0, 0], [1, 0, 0]] as [number, number, number][],
        [[0, 1, 0], [0, 2, 0], [0, 3, 0]] as [number, number, number][],
      ],
    }
    expect(spheresForInstance(instance, info, 'protein')).toHaveLength(1)
    expect(spheresForInstance(instance, info, 'chain')).toHaveLength(2)
    expect(spheresForInstance(instance, info, 'atomistic')).toHaveLength(5)
  })

  it('applies color overrides and highlight dimming', () => {
    const store = new SceneStore()
    const snap = snapshot([1, 2])
    snap.instances[1].ingredient = 'lipid'
    snap.ingredients.lipid = {
      bounding_radius: 1, color: [0.9, 0.8, 0.2], pivot: [0, 0, 0], chains: null,
    }
    snap.view.colors = { lipid: [1, 0, 0] }
    snap.view.highlights = ['lipid']
    const viewport = new Viewport()
    store.replace(snap)
    viewport.update(store)
    const meshes = viewport.group.children as unknown as Array<{
      userData: { ingredient: string }
      material: { opacity: number; color: { r: number } }
    }>
    const lipid = meshes.find((m) => m.userData.ingredient === 'lipid')!
    const gold = meshes.find((m) => m.userData.ingredient === 'Au')!
    expect(lipid.material.color.r).toBeCloseTo(1)
    expect(lipid.material.opacity).toBe(1)
    expect(gold.material.opacity).toBeLessThan(0.5) // dimmed, not highlighted
  })

  it('collects labels when labeling is on', () => {
    const store = new SceneStore()
    const snap = snapshot([1, 2])
    snap.view.labeling = true
    store.replace(snap)
    const viewport = new Viewport()
    viewport.update(store)
    expect(viewport.labels.map((l) => l.text)).toEqual(['Au'])
  })
})
