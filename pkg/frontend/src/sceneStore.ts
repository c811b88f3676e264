// Client-side scene state: full snapshots plus incremental delta handling.
//
// Removals and view changes apply in place; additions only arrive as id
// ranges, so the store flags that a snapshot refetch is needed and the
// caller reconciles via GET /scene (same path as a WebSocket reconnect).

import type {
  IngredientInfo,
  InstanceRecord,
  SceneDelta,
  SceneSnapshot,
  ViewState,
} from './api'

const DEFAULT_VIEW: ViewState = {
  colors: {},
  highlights: [],
  render_mode: 'protein',
  labeling: false,
}

export class SceneStore {
  instances = new Map<number, InstanceRecord>()
  ingredients: Record<string, IngredientInfo> = {}
  view: ViewState = DEFAULT_VIEW
  onChange: (() => void) | null = null

  count(): number {
    return this.instances.size
  }

  replace(snapshot: SceneSnapshot): void {
    this.instances = new Map(snapshot.instances.map((i) => [i.id, i]))
    this.ingredients = snapshot.ingredients
    this.view = snapshot.view
    this.onChange?.()
  }

  /** Apply a delta; returns true when a snapshot refetch is required. */
  applyDelta(delta: SceneDelta): boolean {
    for (const id of delta.removed) this.instances.delete(id)
    this.view = delta.view
    let needsFetch = false
    for (const [lo, hi] of delta.added) {
      for (let id = lo; id <= hi; id++) {
        if (!this.instances.has(id)) {
          needsFetch = true
          break
        }
      }
      if (needsFetch) break
    }
    // Count drift (e.g. missed events) also forces a reconcile.
    if (!needsFetch && delta.instance_count !== this.instances.size) {
      needsFetch = true
    }
    if (!needsFetch) this.onChange?.()
    return needsFetch
  }
}
