// Three.js viewport: the scene as spheres, one per instance / chain / residue
// depending on the render mode, with color overrides, highlight dimming and
// HTML overlay labels.
//
// The scene graph works headless (tests assert against it); the WebGL
// renderer and controls only come alive in attach(), i.e. in a browser.

import * as THREE from 'three'
import { OrbitControls } from 'three/examples/jsm/controls/OrbitControls.js'

import type { InstanceRecord, IngredientInfo, ViewState } from './api'
import type { SceneStore } from './sceneStore'

const DIMMED_OPACITY = 0.15

type Vec3 = [number, number, number]

function applyQuaternion(q: [number, number, number, number], v: Vec3): Vec3 {
  // Wire order is (w, x, y, z).
  const [w, x, y, z] = q
  const quat = new THREE.Quaternion(x, y, z, w)
  const out = new THREE.Vector3(v[0], v[1], v[2]).applyQuaternion(quat)
  return [out.x, out.y, out.z]
}

function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

interface SphereSpec {
  instanceId: number
  ingredient: string
  center: Vec3
  radius: number
}

export function spheresForInstance(
  instance: InstanceRecord,
  info: IngredientInfo,
  mode: ViewState['render_mode'],
): SphereSpec[] {
  const pose = (local: Vec3): Vec3 =>
    add(applyQuaternion(instance.quaternion, local), instance.position)
  if (mode === 'chain' && info.chains && info.chains.length > 0) {
    return info.chains.map((chain) => {
      const centroid: Vec3 = [0, 0, 0]
      for (const p of chain) {
        centroid[0] += p[0] / chain.length
        centroid[1] += p[1] / chain.length
        centroid[2] += p[2] / chain.length
      }
      return {
        instanceId: instance.id,
        ingredient: instance.ingredient,
        center: pose(centroid),
        radius: info.bounding_radius / 2,
      }
    })
  }
  if (mode === 'atomistic' && info.chains && info.chains.length > 0) {
    return info.chains.flatMap((chain) =>
      chain.map((p) => ({
        instanceId: instance.id,
        ingredient: instance.ingredient,
        center: pose(p as Vec3),
        radius: Math.max(info.bounding_radius / 8, 0.15),
      })),
    )
  }
  // Protein mode (and ingredients without substructure): one sphere at the
  // pivot, scaled by the bounding radius.
  return [{
    instanceId: instance.id,
    ingredient: instance.ingredient,
    center: pose(info.pivot),
    radius: info.bounding_radius,
  }]
}

const FALLBACK_INFO: IngredientInfo = {
  bounding_radius: 0.5,
  color: [0.7, 0.7, 0.7],
  pivot: [0, 0, 0],
  chains: null,
}

export class Viewport {
  scene = new THREE.Scene()
  group = new THREE.Group()
  labels: { text: string; position: Vec3 }[] = []
  private geometry = new THREE.SphereGeometry(1, 16, 12)
  private renderer: THREE.WebGLRenderer | null = null
  private camera: THREE.PerspectiveCamera | null = null
  private controls: OrbitControls | null = null
  private labelLayer: HTMLElement | null = null
  private drawnInstanceIds = new Set<number>()

  constructor() {
    this.scene.add(this.group)
    const ambient = new THREE.AmbientLight(0xffffff, 0.7)
    const sun = new THREE.DirectionalLight(0xffffff, 1.2)
    sun.position.set(60, 80, 100)
    this.scene.add(ambient, sun)
  }

  /** Number of distinct scene instances currently drawn. */
  instanceCount(): number {
    return this.drawnInstanceIds.size
  }

  /** Number of sphere meshes (chains/residues expand to several). */
  sphereCount(): number {
    return this.group.children.length
  }

  update(store: SceneStore): void {
    this.group.clear()
    this.drawnInstanceIds.clear()
    this.labels = []
    const view = store.view
    const highlightActive = view.highlights.length > 0
    const highlighted = new Set(view.highlights)
    const labelled = new Set<string>()

    for (const instance of store.instances.values()) {
      const info = store.ingredients[instance.ingredient] ?? FALLBACK_INFO
      const rgbSource = view.colors[instance.ingredient] ?? info.color
      const dim = highlightActive && !highlighted.has(instance.ingredient)
      for (const spec of spheresForInstance(instance, info, view.render_mode)) {
        const material = new THREE.MeshLambertMaterial({
          color: new THREE.Color(rgbSource[0], rgbSource[1], rgbSource[2]),
          transparent: dim,
          opacity: dim ? DIMMED_OPACITY : 1.0,
        })
        const mesh = new THREE.Mesh(this.geometry, material)
        mesh.position.set(spec.center[0], spec.center[1], spec.center[2])
        mesh.scale.setScalar(spec.radius)
        mesh.userData.instanceId = spec.instanceId
        mesh.userData.ingredient = spec.ingredient
        this.group.add(mesh)
        this.drawnInstanceIds.add(spec.instanceId)
      }
      if (view.labeling && !labelled.has(instance.ingredient)) {
        labelled.add(instance.ingredient)
        this.labels.push({ text: instance.ingredient, position: instance.position })
      }
    }
    this.syncLabelLayer()
  }

  attach(container: HTMLElement): void {
    const width = container.clientWidth || 800
    const height = container.clientHeight || 600
    this.camera = new THREE.PerspectiveCamera(50, width / height, 0.1, 5000)
    this.camera.position.set(60, 60, 90)
    this.renderer = new THREE.WebGLRenderer({ antialias: true })
    this.renderer.setSize(width, height)
    this.renderer.setClearColor(0x10141a)
    container.appendChild(this.renderer.domElement)
    this.controls = new OrbitControls(this.camera, this.renderer.domElement)
    this.labelLayer = document.createElement('div')
    this.labelLayer.className = 'label-layer'
    container.appendChild(this.labelLayer)

    const loop = () => {
      requestAnimationFrame(loop)
      this.controls?.update()
      this.renderer?.render(this.scene, this.camera!)
      this.projectLabels()
    }
    loop()
  }

  private syncLabelLayer(): void {
    if (!this.labelLayer) return
    this.labelLayer.textContent = ''
    for (const label of this.labels) {
      const el = document.createElement('span')
      el.className = 'viewport-label'
      el.textContent = label.text
      this.labelLayer.appendChild(el)
    }
  }

  private projectLabels(): void {
    if (!this.labelLayer || !this.camera || !this.renderer) return
    const { width, height } = this.renderer.domElement
    Array.from(this.labelLayer.children).forEach((child, i) => {
      const label = this.labels[i]
      if (!label) return
      const p = new THREE.Vector3(...label.position).project(this.camera!)
      const el = child as HTMLElement
      el.style.left = `${((p.x + 1) / 2) * width}px`
      el.style.top = `${((1 - p.y) / 2) * height}px`
      el.style.display = p.z < 1 ? 'block' : 'none'
    })
  }
}
